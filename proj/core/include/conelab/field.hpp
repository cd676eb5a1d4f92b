#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "conelab/grid.hpp"

namespace conelab {

/// Result-metadata flags. Operations never fail on these conditions; they
/// record that the grid was marginal for the request.
enum FieldWarning : std::uint32_t {
  kWarnKernelUnderResolved = 1u << 0,  // requested nu*tau below grid resolution
  kWarnAliasingRisk = 1u << 1,         // source not decayed at the grid boundary
  kWarnUnderResolved = 1u << 2,        // spectral tail carries significant mass
};

/// Scalar samples on a uniform grid, row-major. Fields are values: operations
/// return new fields and never mutate their inputs.
struct ScalarField {
  GridSpec spec;
  Frame frame = Frame::OriginalX;
  double time_tag = 0.0;
  std::uint32_t warnings = 0;
  std::vector<double> samples;

  ScalarField() = default;
  ScalarField(const GridSpec& g, Frame fr, double tag = 0.0)
      : spec(g), frame(fr), time_tag(tag), samples(g.size(), 0.0) {}

  double& at(int i, int j, int k) { return samples[spec.index(i, j, k)]; }
  double at(int i, int j, int k) const { return samples[spec.index(i, j, k)]; }

  bool all_finite() const;
  double max_abs() const;
  /// Discrete L2 norm with the grid measure.
  double l2_norm() const;

  /// Sample f(x0, x1, x2) at every node.
  static ScalarField sample(const GridSpec& g, Frame fr, double tag,
                            const std::function<double(double, double, double)>& f);
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double c, const ScalarField& a);

/// n-component vector field; component-major storage (comps[i] is row-major).
struct VectorField {
  std::vector<ScalarField> comps;

  VectorField() = default;
  VectorField(const GridSpec& g, Frame fr, double tag = 0.0) {
    comps.assign(static_cast<std::size_t>(g.n), ScalarField(g, fr, tag));
  }

  const GridSpec& spec() const { return comps.front().spec; }
  Frame frame() const { return comps.front().frame; }
  double time_tag() const { return comps.front().time_tag; }
  void set_time_tag(double tag) {
    for (auto& c : comps) c.time_tag = tag;
  }
  int components() const { return static_cast<int>(comps.size()); }

  bool all_finite() const;
  double max_abs() const;
  double l2_norm() const;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(double c, const VectorField& a);

/// C2 polynomial taper: 1 on the inner (1 - width) fraction of each axis,
/// falling smoothly to 0 at the boundary. Applied to convolution sources to
/// suppress periodic wrap-around.
ScalarField apply_taper(const ScalarField& f, double width = 0.125);

/// Taper weight for one normalized axis coordinate u = |x| / h.
double taper_weight(double u, double width = 0.125);

}  // namespace conelab
