#include "conelab/field.hpp"

#include <cmath>
#include <stdexcept>

namespace conelab {

namespace {
void require_same_layout(const ScalarField& a, const ScalarField& b) {
  if (!(a.spec == b.spec)) throw std::invalid_argument("field op: grid mismatch");
}
}  // namespace

bool ScalarField::all_finite() const {
  for (const double v : samples)
    if (!std::isfinite(v)) return false;
  return true;
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (const double v : samples) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField::l2_norm() const {
  double ss = 0.0;
  for (const double v : samples) ss += v * v;
  return std::sqrt(ss * spec.cell_volume());
}

ScalarField ScalarField::sample(const GridSpec& g, Frame fr, double tag,
                                const std::function<double(double, double, double)>& f) {
  ScalarField out(g, fr, tag);
  const auto xs = g.axis_coords();
  const int N = g.points_per_axis;
  std::size_t idx = 0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) out.samples[idx++] = f(xs[i], xs[j], xs[k]);
  return out;
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require_same_layout(a, b);
  ScalarField out = a;
  out.warnings |= b.warnings;
  for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += b.samples[i];
  return out;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  require_same_layout(a, b);
  ScalarField out = a;
  out.warnings |= b.warnings;
  for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] -= b.samples[i];
  return out;
}

ScalarField operator*(double c, const ScalarField& a) {
  ScalarField out = a;
  for (double& v : out.samples) v *= c;
  return out;
}

bool VectorField::all_finite() const {
  for (const auto& c : comps)
    if (!c.all_finite()) return false;
  return true;
}

double VectorField::max_abs() const {
  double m = 0.0;
  for (const auto& c : comps) m = std::max(m, c.max_abs());
  return m;
}

double VectorField::l2_norm() const {
  double ss = 0.0;
  for (const auto& c : comps) {
    const double n = c.l2_norm();
    ss += n * n;
  }
  return std::sqrt(ss);
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  VectorField out = a;
  for (std::size_t i = 0; i < out.comps.size(); ++i)
    out.comps[i] = out.comps[i] + b.comps[i];
  return out;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  VectorField out = a;
  for (std::size_t i = 0; i < out.comps.size(); ++i)
    out.comps[i] = out.comps[i] - b.comps[i];
  return out;
}

VectorField operator*(double c, const VectorField& a) {
  VectorField out = a;
  for (auto& comp : out.comps) comp = c * comp;
  return out;
}

double taper_weight(double u, double width) {
  const double start = 1.0 - width;
  if (u <= start) return 1.0;
  if (u >= 1.0) return 0.0;
  const double s = (u - start) / width;  // s in (0,1)
  // Quintic smoothstep complement: C2 at both ends.
  const double c = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
  return 1.0 - c;
}

ScalarField apply_taper(const ScalarField& f, double width) {
  ScalarField out = f;
  const int N = f.spec.points_per_axis;
  const double h = f.spec.half_extent;
  std::vector<double> w(N);
  for (int i = 0; i < N; ++i) w[i] = taper_weight(std::abs(f.spec.coord(i)) / h, width);
  std::size_t idx = 0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const double wij = w[i] * w[j];
      for (int k = 0; k < N; ++k) out.samples[idx++] *= wij * w[k];
    }
  return out;
}

}  // namespace conelab
