#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace conelab {

/// Adaptive Simpson quadrature on [a, b] with absolute/relative tolerance.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-12, int max_depth = 48);

/// Fixed-node Gauss-Legendre quadrature on [a, b].
double integrate_gauss(const std::function<double(double)>& f, double a, double b,
                       int panels = 64);

/// Maximum of a scalar function over [a, b]: dense bracketing scan followed by
/// golden-section refinement of the best bracket. Returns {argmax, max}.
std::pair<double, double> maximize_scan_golden(const std::function<double(double)>& f,
                                               double a, double b,
                                               int scan_points = 2048,
                                               double tol = 1e-14);

/// Root of a monotone function on [a, b] by bisection.
double bisect(const std::function<double(double)>& f, double a, double b,
              double tol = 1e-15, int max_iter = 200);

/// Least-squares line fit y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double residual_rms = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Deterministic uniform doubles in [0, 1) from a 64-bit generator state
/// (splitmix64). Used for reproducible sample points independent of the
/// standard library's distribution implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

 private:
  std::uint64_t state_;
};

}  // namespace conelab
