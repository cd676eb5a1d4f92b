#include "conelab/fields.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "conelab/kernels.hpp"

namespace conelab {

namespace {

// Monotone slope rule: centered difference clamped to three times the
// smaller one-sided difference (Hyman), zero across data extrema.
double limited_slope(double dm, double dp) {
  if (dm * dp <= 0.0) return 0.0;
  const double centered = 0.5 * (dm + dp);
  const double lim = 3.0 * std::min(std::abs(dm), std::abs(dp));
  return std::copysign(std::min(std::abs(centered), lim), centered);
}

// 1-D monotone cubic on four consecutive samples f[-1..2]; u in [0,1] between
// f[0] and f[1].
double pchip_cell(double fm1, double f0, double f1, double f2, double u) {
  const double d0 = f0 - fm1;
  const double d1 = f1 - f0;
  const double d2 = f2 - f1;
  const double s0 = limited_slope(d0, d1);
  const double s1 = limited_slope(d1, d2);
  const double u2 = u * u;
  const double u3 = u2 * u;
  const double h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
  const double h10 = u3 - 2.0 * u2 + u;
  const double h01 = -2.0 * u3 + 3.0 * u2;
  const double h11 = u3 - u2;
  return h00 * f0 + h10 * s0 + h01 * f1 + h11 * s1;
}

struct AxisQuery {
  int base = 0;      // index of the cell's left node
  double u = 0.0;    // fraction within the cell
  bool outside = false;
};

AxisQuery locate(const GridSpec& g, double x, bool clamp) {
  AxisQuery q;
  const double pos = (x + g.half_extent) / g.spacing();
  const int N = g.points_per_axis;
  if (pos < 0.0 || pos > N - 1) {
    if (!clamp) {
      q.outside = true;
      return q;
    }
    q.base = pos < 0.0 ? 0 : N - 2;
    q.u = pos < 0.0 ? 0.0 : 1.0;
    return q;
  }
  q.base = std::min(static_cast<int>(pos), N - 2);
  q.u = pos - q.base;
  return q;
}

int clamp_index(int i, int N) { return i < 0 ? 0 : (i >= N ? N - 1 : i); }

}  // namespace

double interp3_monotone(const ScalarField& f, double x0, double x1, double x2,
                        bool clamp) {
  const GridSpec& g = f.spec;
  const AxisQuery q0 = locate(g, x0, clamp);
  const AxisQuery q1 = locate(g, x1, clamp);
  const AxisQuery q2 = locate(g, x2, clamp);
  if (q0.outside || q1.outside || q2.outside) return 0.0;

  const int N = g.points_per_axis;
  double plane[4][4];
  double line[4];
  for (int a = -1; a <= 2; ++a) {
    const int i = clamp_index(q0.base + a, N);
    for (int b = -1; b <= 2; ++b) {
      const int j = clamp_index(q1.base + b, N);
      const int km1 = clamp_index(q2.base - 1, N);
      const int k0 = clamp_index(q2.base, N);
      const int k1 = clamp_index(q2.base + 1, N);
      const int k2 = clamp_index(q2.base + 2, N);
      plane[a + 1][b + 1] = pchip_cell(f.at(i, j, km1), f.at(i, j, k0), f.at(i, j, k1),
                                       f.at(i, j, k2), q2.u);
    }
  }
  for (int a = 0; a < 4; ++a)
    line[a] = pchip_cell(plane[a][0], plane[a][1], plane[a][2], plane[a][3], q1.u);
  return pchip_cell(line[0], line[1], line[2], line[3], q0.u);
}

namespace {

// One resampling pass along `axis` of a (shape[0], shape[1], shape[2]) array.
// pos holds index-space query positions; NaN marks an outside query (zero).
std::vector<double> resample_axis(const std::vector<double>& in,
                                  std::array<int, 3>& shape, int axis,
                                  const std::vector<double>& pos) {
  const int n_axis = shape[axis];
  const int n_out = static_cast<int>(pos.size());
  int n_outer = 1, n_inner = 1;
  for (int d = 0; d < axis; ++d) n_outer *= shape[d];
  for (int d = axis + 1; d < 3; ++d) n_inner *= shape[d];

  std::vector<double> out(static_cast<std::size_t>(n_outer) * n_out * n_inner);
  for (int o = 0; o < n_outer; ++o) {
    const double* src = in.data() + static_cast<std::size_t>(o) * n_axis * n_inner;
    double* dst = out.data() + static_cast<std::size_t>(o) * n_out * n_inner;
    for (int q = 0; q < n_out; ++q) {
      double* line = dst + static_cast<std::size_t>(q) * n_inner;
      if (std::isnan(pos[q])) {
        std::fill(line, line + n_inner, 0.0);
        continue;
      }
      const int base = std::min(static_cast<int>(pos[q]),
                                std::max(n_axis - 2, 0));
      const double u = pos[q] - base;
      const int im1 = clamp_index(base - 1, n_axis);
      const int i0 = clamp_index(base, n_axis);
      const int i1 = clamp_index(base + 1, n_axis);
      const int i2 = clamp_index(base + 2, n_axis);
      const double* fm1 = src + static_cast<std::size_t>(im1) * n_inner;
      const double* f0 = src + static_cast<std::size_t>(i0) * n_inner;
      const double* f1 = src + static_cast<std::size_t>(i1) * n_inner;
      const double* f2 = src + static_cast<std::size_t>(i2) * n_inner;
      for (int t = 0; t < n_inner; ++t)
        line[t] = pchip_cell(fm1[t], f0[t], f1[t], f2[t], u);
    }
  }
  shape[axis] = n_out;
  return out;
}

std::vector<double> index_positions(const GridSpec& src,
                                    const std::vector<double>& coords, bool clamp) {
  std::vector<double> pos(coords.size());
  const int N = src.points_per_axis;
  for (std::size_t q = 0; q < coords.size(); ++q) {
    double p = (coords[q] + src.half_extent) / src.spacing();
    if (p < 0.0 || p > N - 1) {
      if (!clamp) {
        pos[q] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      p = p < 0.0 ? 0.0 : static_cast<double>(N - 1);
    }
    pos[q] = p;
  }
  return pos;
}

}  // namespace

ScalarField resample_monotone(const ScalarField& src, const GridSpec& dst,
                              Frame dst_frame, double dst_tag,
                              const std::array<std::vector<double>, 3>& queries,
                              bool clamp) {
  for (const auto& q : queries)
    if (static_cast<int>(q.size()) != dst.points_per_axis)
      throw std::invalid_argument("resample_monotone: query/grid size mismatch");
  std::array<int, 3> shape = {src.spec.points_per_axis, src.spec.points_per_axis,
                              src.spec.points_per_axis};
  std::vector<double> data = src.samples;
  for (int axis = 2; axis >= 0; --axis)
    data = resample_axis(data, shape, axis,
                         index_positions(src.spec, queries[axis], clamp));
  ScalarField out(dst, dst_frame, dst_tag);
  out.warnings = src.warnings;
  out.samples = std::move(data);
  return out;
}

GaussianData make_gaussian_data(const ConeChart& chart, int points_original,
                                int points_cylinder, double amplitude) {
  if (chart.n() != 3)
    throw std::domain_error("make_gaussian_data: sampled fields support n = 3");
  GaussianData data;
  const double rho = chart.rho();
  data.a = 1.0 / (rho * rho * rho);
  data.sigma = std::sqrt(0.5 * data.a);

  const GridSpec xgrid(3, points_original, 8.0 * data.sigma);
  const double a = data.a;
  const double amp = amplitude;
  ScalarField hx = ScalarField::sample(
      xgrid, Frame::OriginalX, 0.0, [rho, a, amp](double x0, double x1, double x2) {
        return amp / rho * std::exp(-(x0 * x0 + x1 * x1 + x2 * x2) / a);
      });
  data.h = VectorField(xgrid, Frame::OriginalX, 0.0);
  for (auto& c : data.h.comps) c = hx;

  const GridSpec zgrid = cylinder_grid(points_cylinder);
  ScalarField hz = ScalarField::sample(
      zgrid, Frame::CylinderZ, 0.0, [a, amp](double z0, double z1, double z2) {
        const double t0 = std::tan(z0), t1 = std::tan(z1), t2 = std::tan(z2);
        return amp * std::exp(-(t0 * t0 + t1 * t1 + t2 * t2) / a);
      });
  data.h_rho = VectorField(zgrid, Frame::CylinderZ, 0.0);
  for (auto& c : data.h_rho.comps) c = hz;
  return data;
}

double mass_outside_cone_base(const ScalarField& h_rho, const ConeChart& chart) {
  // Cylinder-frame samples live on z = y / rho inside (-pi/2, pi/2)^n, which
  // is exactly the open cone base; any sample at or beyond the boundary would
  // be outside. Audit the stored grid for such mass.
  const double half = std::numbers::pi / 2.0;
  const int N = h_rho.spec.points_per_axis;
  const auto zs = h_rho.spec.axis_coords();
  double mass = 0.0;
  std::size_t idx = 0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k, ++idx) {
        if (std::abs(zs[i]) >= half || std::abs(zs[j]) >= half ||
            std::abs(zs[k]) >= half)
          mass += std::abs(h_rho.samples[idx]);
      }
  const double scale = std::pow(chart.rho(), 3.0);  // dy = rho^3 dz at t = 0
  return mass * h_rho.spec.cell_volume() * scale;
}

VectorField push_velocity(const VectorField& w, const ConeChart& chart,
                          const GridSpec& x_grid) {
  if (w.frame() != Frame::CylinderZ && w.frame() != Frame::ConeY)
    throw std::invalid_argument("push_velocity: expected a transformed-frame field");
  const double s = w.time_tag();
  const double t = chart.t_of_s(s);
  if (!(t < chart.rho())) throw std::domain_error("push_velocity: t >= rho");
  const double scale = 1.0 / (chart.rho() - t);
  const double y_scale = (w.frame() == Frame::ConeY) ? (chart.rho() - t) : 1.0;

  std::vector<double> zq(x_grid.points_per_axis);
  const auto xs = x_grid.axis_coords();
  for (std::size_t i = 0; i < zq.size(); ++i) zq[i] = std::atan(xs[i]) * y_scale;
  const std::array<std::vector<double>, 3> queries = {zq, zq, zq};

  VectorField v;
  for (const auto& comp : w.comps) {
    ScalarField vc =
        resample_monotone(comp, x_grid, Frame::OriginalX, t, queries, /*clamp=*/true);
    for (double& q : vc.samples) q *= scale;
    v.comps.push_back(std::move(vc));
  }
  return v;
}

VectorField pull_velocity(const VectorField& v, const ConeChart& chart,
                          int points_cylinder) {
  if (v.frame() != Frame::OriginalX)
    throw std::invalid_argument("pull_velocity: expected an original-frame field");
  const double t = v.time_tag();
  if (!(t >= 0.0) || !(t < chart.rho()))
    throw std::domain_error("pull_velocity: t outside [0, rho)");
  const double s = chart.s_of_t(t);
  const double scale = chart.rho() - t;

  const GridSpec zgrid = cylinder_grid(points_cylinder);
  const auto zs = zgrid.axis_coords();
  std::vector<double> xq(zs.size());
  for (std::size_t i = 0; i < zs.size(); ++i) xq[i] = std::tan(zs[i]);
  const std::array<std::vector<double>, 3> queries = {xq, xq, xq};

  VectorField w;
  for (const auto& comp : v.comps) {
    ScalarField wc =
        resample_monotone(comp, zgrid, Frame::CylinderZ, s, queries, /*clamp=*/false);
    for (double& q : wc.samples) q *= scale;
    w.comps.push_back(std::move(wc));
  }
  return w;
}

VectorField laplacian_via_cone(const VectorField& w, const ConeChart& chart) {
  if (w.frame() != Frame::CylinderZ)
    throw std::invalid_argument("laplacian_via_cone: expected a cylinder-frame field");
  const double s = w.time_tag();
  const double t = chart.t_of_s(s);
  const double inv_rt = 1.0 / (chart.rho() - t);

  const GridSpec& g = w.spec();
  const int N = g.points_per_axis;
  const auto zs = g.axis_coords();
  std::vector<double> tanz(N), cos4(N);
  for (int i = 0; i < N; ++i) {
    tanz[i] = std::tan(zs[i]);
    const double c = std::cos(zs[i]);
    cos4[i] = c * c * c * c;
  }

  VectorField out;
  out.comps.assign(w.comps.size(), ScalarField(g, Frame::CylinderZ, s));
  for (std::size_t c = 0; c < w.comps.size(); ++c) {
    for (int axis = 0; axis < 3; ++axis) {
      const ScalarField d1 = spectral_derivative(w.comps[c], axis);
      const ScalarField d2 = spectral_derivative(d1, axis);
      std::size_t idx = 0;
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
          for (int k = 0; k < N; ++k, ++idx) {
            const int ax_i = (axis == 0) ? i : (axis == 1) ? j : k;
            out.comps[c].samples[idx] +=
                inv_rt * cos4[ax_i] *
                (d2.samples[idx] - 2.0 * tanz[ax_i] * d1.samples[idx]);
          }
    }
  }
  return out;
}

ScalarField divergence(const VectorField& v) {
  ScalarField out(v.spec(), v.frame(), v.time_tag());
  for (int axis = 0; axis < 3; ++axis) {
    const ScalarField d = spectral_derivative(v.comps[axis], axis);
    for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += d.samples[i];
  }
  return out;
}

}  // namespace conelab
