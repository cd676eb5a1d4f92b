#pragma once

#include <span>
#include <vector>

#include "conelab/dual.hpp"

namespace conelab {

/// The four time-dependent coefficient families of the transformed equation.
enum class CoeffKind { Burgers, Convection, Damping, Leray };

/// Geometry of the cone construction: dimension, horizon time rho, and the
/// (t,x) <-> (s,y) <-> (t,z) coordinate calculus with its Jacobians.
///
/// Conventions:
///   s = t / sqrt(rho^2 - t^2)            time rescaling, [0,rho) -> [0,inf)
///   y_i = (rho - t) * atan(x_i)          cone coordinate
///   z_i = y_i / (rho - t) = atan(x_i)    fixed cylinder coordinate
class ConeChart {
 public:
  ConeChart(int n, double rho);

  int n() const { return n_; }
  double rho() const { return rho_; }

  // -- time maps ------------------------------------------------------------
  double t_of_s(double s) const;
  double s_of_t(double t) const;
  double ds_dt(double t) const;

  // -- space maps (componentwise) --------------------------------------------
  std::vector<double> y_of_x(double t, std::span<const double> x) const;
  std::vector<double> x_of_y(double t, std::span<const double> y) const;
  double y_of_x1(double t, double x) const;
  double x_of_y1(double t, double y) const;

  /// Jacobian dy/dx = (rho - t)^n * prod_i 1/(1 + x_i^2).
  double measure_factor(double t, std::span<const double> x) const;

  /// Half-width of the cone section at time t: (rho - t) * pi / 2.
  double cone_halfwidth(double t) const;

  // -- coefficients ----------------------------------------------------------
  double coeff(CoeffKind kind, double t) const;

  /// Supremum of coeff(kind, .) over t in [0, rho], located by a 2048-point
  /// bracketing scan refined by golden-section search. Returns {argmax, sup}.
  std::pair<double, double> coeff_sup(CoeffKind kind) const;

  /// Numerically integrates the damping coefficient in s-time over
  /// t(s) in [0, rho - eps]; equals ln(rho/eps) analytically.
  double damping_time_integral(double eps) const;

  /// Integral of (rho - t)^{n-1} * C over the cylinder [0,rho] x (-pi/2,pi/2)^n,
  /// i.e. the space-time mass bound C * pi^n * rho^n / n of the damping term.
  /// The t-integral is evaluated by quadrature.
  double cylinder_damping_mass(double bound) const;

  // -- dual-number overloads (forward-mode derivatives of the maps) ----------
  Dual t_of_s(Dual s) const;
  Dual s_of_t(Dual t) const;
  Dual y_of_x1(Dual t, Dual x) const;
  Dual coeff(CoeffKind kind, Dual t) const;

 private:
  void check_t(double t) const;

  int n_;
  double rho_;
};

}  // namespace conelab
