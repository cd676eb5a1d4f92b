#include "conelab/audit.hpp"

#include <array>
#include <cmath>

#include "conelab/dual.hpp"
#include "conelab/numerics.hpp"

namespace conelab {

namespace {

// Analytic test profile w_i(s, y) = A exp(-|y - b|^2 / (2 sigma^2))
// (1 + 0.3 sin(omega s + phi)), with switches to suppress the s- or
// y-dependence for term isolation.
struct Profile {
  double A = 1.0;
  std::array<double, 3> b = {0.0, 0.0, 0.0};
  double sigma = 1.0;
  double omega = 0.0;
  double phi = 0.0;
  bool depends_on_y = true;
  bool depends_on_s = true;

  template <typename T>
  T eval(T s, const std::array<T, 3>& y) const {
    using std::exp;
    using std::sin;
    T val = T(A);
    if (depends_on_y) {
      T q = T(0.0);
      for (int j = 0; j < 3; ++j) {
        const T d = y[j] - b[j];
        q = q + d * d;
      }
      val = val * exp(T(-1.0) * q / (2.0 * sigma * sigma));
    }
    if (depends_on_s) val = val * (1.0 + 0.3 * sin(omega * s + phi));
    return val;
  }

  double dy(double s, const std::array<double, 3>& y, int j) const {
    if (!depends_on_y) return 0.0;
    return eval(s, y) * (-(y[j] - b[j]) / (sigma * sigma));
  }

  double dsdt(double s, const std::array<double, 3>& y) const {
    if (!depends_on_s) return 0.0;
    double val = A;
    if (depends_on_y) {
      double q = 0.0;
      for (int j = 0; j < 3; ++j) q += (y[j] - b[j]) * (y[j] - b[j]);
      val *= std::exp(-q / (2.0 * sigma * sigma));
    }
    return val * 0.3 * omega * std::cos(omega * s + phi);
  }
};

// d v / d t at fixed x for v = w(s(t), y(t,x)) / (rho - t).
double dv_dt(const ConeChart& chart, const Profile& w, double t,
             const std::array<double, 3>& x) {
  const Dual td = Dual::seed(t);
  const Dual s = chart.s_of_t(td);
  std::array<Dual, 3> y;
  for (int j = 0; j < 3; ++j) y[j] = chart.y_of_x1(td, Dual(x[j]));
  const Dual v = w.eval(s, y) / (chart.rho() - td);
  return v.d;
}

// d v / d x_j at fixed t.
double dv_dxj(const ConeChart& chart, const Profile& w, double t,
              const std::array<double, 3>& x, int j) {
  const double s = chart.s_of_t(t);
  std::array<Dual, 3> y;
  for (int a = 0; a < 3; ++a) {
    const Dual xa = (a == j) ? Dual::seed(x[a]) : Dual(x[a]);
    y[a] = chart.y_of_x1(Dual(t), xa);
  }
  const Dual v = w.eval(Dual(s), y) / (chart.rho() - t);
  return v.d;
}

double v_value(const ConeChart& chart, const Profile& w, double t,
               const std::array<double, 3>& x) {
  const double s = chart.s_of_t(t);
  std::array<double, 3> y;
  for (int j = 0; j < 3; ++j) y[j] = chart.y_of_x1(t, x[j]);
  return w.eval(s, y) / (chart.rho() - t);
}

// Diagonal Jacobian dy/dx via duals.
double jacobian_det(const ConeChart& chart, double t, const std::array<double, 3>& x) {
  double det = 1.0;
  for (int j = 0; j < 3; ++j) {
    const Dual yj = chart.y_of_x1(Dual(t), Dual::seed(x[j]));
    det *= yj.d;
  }
  return det;
}

double rel_mismatch(double measured, double reference) {
  const double scale = std::max(std::abs(reference), 1e-30);
  return std::abs(measured - reference) / scale;
}

}  // namespace

bool TransformAuditReport::all_match() const {
  for (const auto& t : terms)
    if (!t.match) return false;
  return resolution_deterministic;
}

TransformAuditReport transform_audit(const ConeChart& chart, int samples,
                                     std::uint64_t seed, double tol) {
  TransformAuditReport report;
  report.samples = samples;
  report.tol = tol;

  SplitMix64 rng(seed);
  const double rho = chart.rho();

  double worst_time = 0.0, worst_burgers = 0.0, worst_damping = 0.0, worst_leray = 0.0;
  double worst_conv_a = 0.0, worst_conv_b = 0.0;
  int a_matches = 0, b_matches = 0;

  for (int sample = 0; sample < samples; ++sample) {
    const double t = rng.uniform(0.05, 0.85) * rho;
    std::array<double, 3> x;
    for (auto& c : x) {
      c = rng.uniform(0.3, 2.5);
      if (rng.next_double() < 0.5) c = -c;
    }
    const double s = chart.s_of_t(t);
    std::array<double, 3> y;
    for (int j = 0; j < 3; ++j) y[j] = chart.y_of_x1(t, x[j]);

    // Inverse of the w_{i,s} coefficient in the v_{i,t} chain rule; every
    // term of the transformed equation is normalized by it.
    const double M = (rho - t) * std::pow(rho * rho - t * t, 1.5) / (rho * rho);
    const double damping_printed = chart.coeff(CoeffKind::Damping, t);
    const double conv_a_printed = chart.coeff(CoeffKind::Convection, t);
    const double conv_b_printed = chart.coeff(CoeffKind::Burgers, t);

    Profile w;
    w.A = rng.uniform(0.5, 2.0);
    for (auto& b : w.b) b = rng.uniform(-0.2, 0.2) * rho;
    w.sigma = rng.uniform(0.2, 0.5) * rho;
    w.omega = rng.uniform(0.5, 2.0);
    w.phi = rng.uniform(0.0, 1.2);  // keeps cos(omega s + phi) away from zero

    // Damping: w constant; M dv/dt isolates the zeroth-order coefficient.
    {
      Profile wc = w;
      wc.depends_on_s = false;
      wc.depends_on_y = false;
      const double measured = M * dv_dt(chart, wc, t, x) / wc.eval(s, y);
      worst_damping = std::max(worst_damping, rel_mismatch(measured, damping_printed));
    }

    // Time term: w depends on s only; subtracting the damping part leaves the
    // w_{i,s} coefficient, which must be exactly 1.
    {
      Profile ws = w;
      ws.depends_on_y = false;
      const double val = ws.eval(s, y);
      const double measured =
          (M * dv_dt(chart, ws, t, x) - damping_printed * val) / ws.dsdt(s, y);
      worst_time = std::max(worst_time, rel_mismatch(measured, 1.0));
    }

    // Convection: w depends on a single y axis; the remainder after damping
    // is -(coeff) atan(x_j) w_{,j}, measured against both printed variants.
    {
      const int jstar = static_cast<int>(rng.next_u64() % 3);
      Profile wy = w;
      wy.depends_on_s = false;
      wy.b = {0.0, 0.0, 0.0};
      // Single-axis dependence: center the other axes so their derivative
      // vanishes at the sample point by moving them onto y.
      for (int a = 0; a < 3; ++a)
        if (a != jstar) wy.b[a] = y[a];
      wy.b[jstar] = y[jstar] + rng.uniform(0.1, 0.3) * rho;
      const double val = wy.eval(s, y);
      const double dwj = wy.dy(s, y, jstar);
      const double measured =
          -(M * dv_dt(chart, wy, t, x) - damping_printed * val) /
          (std::atan(x[jstar]) * dwj);
      const double ma = rel_mismatch(measured, conv_a_printed);
      const double mb = rel_mismatch(measured, conv_b_printed);
      worst_conv_a = std::max(worst_conv_a, ma);
      worst_conv_b = std::max(worst_conv_b, mb);
      if (ma <= tol) ++a_matches;
      if (mb <= tol) ++b_matches;
    }

    // Burgers: per (i, j) product v_j d_j v_i against the printed
    // coefficient sqrt(rho^2 - t^2)^3 / (rho^2 (1 + x_j^2)).
    {
      const int j = static_cast<int>(rng.next_u64() % 3);
      Profile wj = w;
      Profile wi = w;
      // Decorrelate the two factors and keep |y_j - b_j| bounded below so the
      // w_{i,j} denominator stays well conditioned.
      wi.b[j] = y[j] + rng.uniform(0.1, 0.3) * rho;
      const double vj = v_value(chart, wj, t, x);
      const double dvi = dv_dxj(chart, wi, t, x, j);
      const double denom = wj.eval(s, y) * wi.dy(s, y, j);
      const double measured = M * vj * dvi / denom;
      const double printed = chart.coeff(CoeffKind::Burgers, t) / (1.0 + x[j] * x[j]);
      worst_burgers = std::max(worst_burgers, rel_mismatch(measured, printed));
    }

    // Leray integrand: per (j, m) strain product with the measure change
    // dx/dy, against the printed coefficient and measure factors.
    {
      const int j = static_cast<int>(rng.next_u64() % 3);
      const int m = static_cast<int>(rng.next_u64() % 3);
      Profile wm = w;
      Profile wjp = w;
      wm.b[j] = y[j] + rng.uniform(0.1, 0.3) * rho;
      wjp.b[m] = y[m] - rng.uniform(0.1, 0.3) * rho;
      const double dvm = dv_dxj(chart, wm, t, x, j);   // v_{m,j}
      const double dvj = dv_dxj(chart, wjp, t, x, m);  // v_{j,m}
      const double denom = wm.dy(s, y, j) * wjp.dy(s, y, m);
      const double measured = M * dvm * dvj / (jacobian_det(chart, t, x) * denom);
      double prod = 1.0;
      for (int a = 0; a < 3; ++a) prod *= (1.0 + x[a] * x[a]);
      const double printed = chart.coeff(CoeffKind::Leray, t) /
                             ((1.0 + x[j] * x[j]) * (1.0 + x[m] * x[m])) * prod /
                             std::pow(rho - t, 3.0);
      worst_leray = std::max(worst_leray, rel_mismatch(measured, printed));
    }
  }

  report.terms = {
      {"time", worst_time, worst_time <= tol},
      {"burgers", worst_burgers, worst_burgers <= tol},
      {"damping", worst_damping, worst_damping <= tol},
      {"leray", worst_leray, worst_leray <= tol},
  };
  report.convection_a_mismatch = worst_conv_a;
  report.convection_b_mismatch = worst_conv_b;
  const bool a_all = (a_matches == samples);
  const bool b_all = (b_matches == samples);
  report.resolved = b_all ? ConvectionVariant::PrintedB : ConvectionVariant::PrintedA;
  report.resolution_deterministic = (a_all != b_all);
  return report;
}

}  // namespace conelab
