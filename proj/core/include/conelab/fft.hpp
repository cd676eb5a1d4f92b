#pragma once

#include <complex>
#include <vector>

#include "conelab/field.hpp"
#include "conelab/grid.hpp"

namespace conelab::spectral {

/// Half-complex (r2c) spectrum of a real field: layout N x N x (N/2 + 1),
/// unnormalized forward transform; `inverse` applies the 1/N^3 factor.
struct Spectrum {
  GridSpec spec;
  Frame frame = Frame::OriginalX;
  double time_tag = 0.0;
  std::uint32_t warnings = 0;
  std::vector<std::complex<double>> data;

  std::size_t nk() const {
    const std::size_t N = static_cast<std::size_t>(spec.points_per_axis);
    return N * N * (N / 2 + 1);
  }
};

Spectrum forward(const ScalarField& f);
ScalarField inverse(const Spectrum& s);

/// Signed angular wavenumber per axis index for a grid of period 2h:
/// xi(m) = pi * m~ / h with m~ the signed frequency. Index N/2 (Nyquist)
/// reports the positive value; odd multipliers must zero it explicitly.
std::vector<double> wavenumbers(const GridSpec& spec);

/// True if the index is the Nyquist frequency of the axis.
inline bool is_nyquist(int index, int N) { return index == N / 2; }

/// Fraction of spectral energy above |xi_axis| >= (2/3) xi_max on any axis;
/// used for under-resolution warnings.
double high_mode_energy_fraction(const Spectrum& s);

}  // namespace conelab::spectral
