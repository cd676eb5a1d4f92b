#pragma once

#include <cmath>

namespace conelab {

/// First-order dual number for forward-mode differentiation. The derivative
/// part rides along every arithmetic operation; seeding `d = 1` on one input
/// makes `.d` the partial derivative with respect to that input.
struct Dual {
  double v = 0.0;
  double d = 0.0;

  constexpr Dual() = default;
  constexpr Dual(double value, double deriv = 0.0) : v(value), d(deriv) {}

  static constexpr Dual seed(double value) { return Dual(value, 1.0); }
};

constexpr Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
constexpr Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
constexpr Dual operator-(Dual a) { return {-a.v, -a.d}; }
constexpr Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
constexpr Dual operator/(Dual a, Dual b) {
  return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
}

constexpr Dual operator+(Dual a, double c) { return {a.v + c, a.d}; }
constexpr Dual operator+(double c, Dual a) { return {c + a.v, a.d}; }
constexpr Dual operator-(Dual a, double c) { return {a.v - c, a.d}; }
constexpr Dual operator-(double c, Dual a) { return {c - a.v, -a.d}; }
constexpr Dual operator*(Dual a, double c) { return {a.v * c, a.d * c}; }
constexpr Dual operator*(double c, Dual a) { return {c * a.v, c * a.d}; }
constexpr Dual operator/(Dual a, double c) { return {a.v / c, a.d / c}; }
constexpr Dual operator/(double c, Dual a) {
  return {c / a.v, -c * a.d / (a.v * a.v)};
}

inline Dual sin(Dual a) { return {std::sin(a.v), a.d * std::cos(a.v)}; }
inline Dual cos(Dual a) { return {std::cos(a.v), -a.d * std::sin(a.v)}; }
inline Dual tan(Dual a) {
  const double c = std::cos(a.v);
  return {std::tan(a.v), a.d / (c * c)};
}
inline Dual atan(Dual a) { return {std::atan(a.v), a.d / (1.0 + a.v * a.v)}; }
inline Dual exp(Dual a) {
  const double e = std::exp(a.v);
  return {e, a.d * e};
}
inline Dual log(Dual a) { return {std::log(a.v), a.d / a.v}; }
inline Dual sqrt(Dual a) {
  const double s = std::sqrt(a.v);
  return {s, 0.5 * a.d / s};
}
inline Dual pow(Dual a, double p) {
  return {std::pow(a.v, p), a.d * p * std::pow(a.v, p - 1.0)};
}

}  // namespace conelab
