#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "conelab/field.hpp"

namespace conelab {

/// Discrete H^m and C^m norms of a field.
struct NormReport {
  double sobolev = 0.0;  // H^m via multiplier (1 + |xi|^2)^{m/2}
  double sup_cm = 0.0;   // max over grid and over |gamma| <= m of |D^gamma f|
  int m = 0;
  std::uint32_t warnings = 0;

  double combined() const { return sobolev > sup_cm ? sobolev : sup_cm; }
};

NormReport sobolev_cm_norm(const ScalarField& f, int m);

/// Componentwise maximum of the scalar reports.
NormReport sobolev_cm_norm(const VectorField& f, int m);

/// Spectral derivative D^gamma for a multi-index (one FFT round trip).
ScalarField spectral_multi_derivative(const ScalarField& f,
                                      const std::array<int, 3>& gamma);

/// All multi-indices with |gamma| <= m (lexicographic, deterministic order).
std::vector<std::array<int, 3>> multi_indices_up_to(int m);

/// Windowed polynomial-decay verification: fits the constant c in
/// |D^gamma f| <= c / (1 + |x|^l) over nested annuli |x| in [1, half_extent]
/// and passes iff the fitted constants do not grow between windows.
struct DecayReport {
  int l = 0;
  int m = 0;
  std::vector<double> window_constants;  // binding constant per annulus
  bool pass = false;
};

DecayReport decay_class_check(const ScalarField& f, int l, int m);
DecayReport decay_class_check(const VectorField& f, int l, int m);

}  // namespace conelab
