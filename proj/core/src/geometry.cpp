#include "conelab/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "conelab/numerics.hpp"

namespace conelab {

ConeChart::ConeChart(int n, double rho) : n_(n), rho_(rho) {
  if (n < 3)
    throw std::domain_error("ConeChart: construction requires dimension n >= 3, got " +
                            std::to_string(n));
  if (!(rho > 0.0)) throw std::domain_error("ConeChart: rho must be positive");
}

void ConeChart::check_t(double t) const {
  if (!(t >= 0.0) || !(t < rho_))
    throw std::domain_error("ConeChart: t must lie in [0, rho)");
}

double ConeChart::t_of_s(double s) const {
  if (!(s >= 0.0)) throw std::domain_error("t_of_s: s must be nonnegative");
  return rho_ * s / std::sqrt(1.0 + s * s);
}

double ConeChart::s_of_t(double t) const {
  check_t(t);
  return t / std::sqrt(rho_ * rho_ - t * t);
}

double ConeChart::ds_dt(double t) const {
  check_t(t);
  const double d = rho_ * rho_ - t * t;
  return rho_ * rho_ / (d * std::sqrt(d));
}

double ConeChart::y_of_x1(double t, double x) const {
  check_t(t);
  return (rho_ - t) * std::atan(x);
}

double ConeChart::x_of_y1(double t, double y) const {
  check_t(t);
  const double half = cone_halfwidth(t);
  if (!(std::abs(y) < half))
    throw std::domain_error("x_of_y: |y_i| must be below (rho - t) * pi / 2");
  return std::tan(y / (rho_ - t));
}

std::vector<double> ConeChart::y_of_x(double t, std::span<const double> x) const {
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = y_of_x1(t, x[i]);
  return y;
}

std::vector<double> ConeChart::x_of_y(double t, std::span<const double> y) const {
  std::vector<double> x(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) x[i] = x_of_y1(t, y[i]);
  return x;
}

double ConeChart::measure_factor(double t, std::span<const double> x) const {
  check_t(t);
  double f = std::pow(rho_ - t, static_cast<double>(n_));
  for (const double xi : x) f /= (1.0 + xi * xi);
  return f;
}

double ConeChart::cone_halfwidth(double t) const {
  return (rho_ - t) * std::numbers::pi / 2.0;
}

double ConeChart::coeff(CoeffKind kind, double t) const {
  // Damping extends continuously to t = rho through the simplified form
  // sqrt(rho^2 - t^2) (rho + t) / rho^2; the other kinds require t < rho.
  if (kind == CoeffKind::Damping) {
    if (!(t >= 0.0) || !(t <= rho_))
      throw std::domain_error("coeff(Damping): t must lie in [0, rho]");
    return std::sqrt(rho_ * rho_ - t * t) * (rho_ + t) / (rho_ * rho_);
  }
  check_t(t);
  const double d = rho_ * rho_ - t * t;
  const double root3 = d * std::sqrt(d);
  switch (kind) {
    case CoeffKind::Burgers:
      return root3 / (rho_ * rho_);
    case CoeffKind::Convection:
    case CoeffKind::Leray:
      return (rho_ - t) * root3 / (rho_ * rho_);
    default:
      break;
  }
  throw std::logic_error("coeff: unknown kind");
}

Dual ConeChart::coeff(CoeffKind kind, Dual t) const {
  const Dual d = rho_ * rho_ - t * t;
  const Dual root3 = d * sqrt(d);
  switch (kind) {
    case CoeffKind::Burgers:
      return root3 / (rho_ * rho_);
    case CoeffKind::Convection:
    case CoeffKind::Leray:
      return (rho_ - t) * root3 / (rho_ * rho_);
    case CoeffKind::Damping:
      return sqrt(d) * (rho_ + t) / (rho_ * rho_);
  }
  throw std::logic_error("coeff: unknown kind");
}

std::pair<double, double> ConeChart::coeff_sup(CoeffKind kind) const {
  // All four families extend continuously to the closed interval [0, rho]:
  // the non-damping kinds vanish at t = rho.
  auto eval = [this, kind](double t) {
    if (kind == CoeffKind::Damping) return coeff(CoeffKind::Damping, t);
    if (t >= rho_) return 0.0;
    return coeff(kind, t);
  };
  return maximize_scan_golden(eval, 0.0, rho_, 2048);
}

double ConeChart::damping_time_integral(double eps) const {
  if (!(eps > 0.0) || !(eps < rho_))
    throw std::domain_error("damping_time_integral: eps must lie in (0, rho)");
  // Integrate in s over t(s) in [0, rho - eps]; substituting t as the
  // integration variable carries the weight ds/dt.
  auto integrand = [this](double t) {
    return coeff(CoeffKind::Damping, t) * ds_dt(t);
  };
  return integrate_adaptive(integrand, 0.0, rho_ - eps, 1e-12);
}

double ConeChart::cylinder_damping_mass(double bound) const {
  if (bound < 0.0)
    throw std::domain_error("cylinder_damping_mass: bound must be nonnegative");
  const double t_mass = integrate_adaptive(
      [this](double t) { return std::pow(rho_ - t, static_cast<double>(n_ - 1)); }, 0.0,
      rho_, 1e-12);
  return bound * std::pow(std::numbers::pi, static_cast<double>(n_)) * t_mass;
}

Dual ConeChart::t_of_s(Dual s) const { return rho_ * s / sqrt(1.0 + s * s); }

Dual ConeChart::s_of_t(Dual t) const { return t / sqrt(rho_ * rho_ - t * t); }

Dual ConeChart::y_of_x1(Dual t, Dual x) const { return (rho_ - t) * atan(x); }

}  // namespace conelab
