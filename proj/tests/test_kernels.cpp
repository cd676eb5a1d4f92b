#include <doctest.h>

#include <cmath>
#include <numbers>

#include "conelab/fields.hpp"
#include "conelab/kernels.hpp"
#include "conelab/numerics.hpp"

using namespace conelab;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField gaussian(const GridSpec& g, double sigma, double amp = 1.0) {
  return ScalarField::sample(g, Frame::OriginalX, 0.0,
                             [sigma, amp](double x, double y, double z) {
                               return amp * std::exp(-(x * x + y * y + z * z) /
                                                     (2.0 * sigma * sigma));
                             });
}

}  // namespace

TEST_CASE("kernel constants: closed-form argmax, M2, C_Kn") {
  const KernelConstants k = kernel_constants(3, 0.75);
  CHECK(k.argmax_z == doctest::Approx(std::sqrt(0.75)).epsilon(1e-8));
  CHECK(k.M2 == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(k.C_G == std::max(k.C, k.Cprime));

  // C against the closed form at the stationary point.
  const double z = std::sqrt((3.0 - 1.5) / 2.0);
  const double expected = std::pow(kPi, -1.5) * std::pow(z, 1.5) * std::exp(-z * z);
  CHECK(k.C == doctest::Approx(expected).epsilon(1e-10));

  // C_Kn: both pieces have closed forms in n = 3 with c = 1/(4 pi):
  // L1(B_1) = 2 pi c = 1/2 and L2^2 = c^2 (4 pi / 3).
  const double c = riesz_constant(3);
  const double l1 = 2.0 * kPi * c;
  const double l2 = c * std::sqrt(4.0 * kPi / 3.0);
  CHECK(k.C_Kn == doctest::Approx(l1 + l2).epsilon(1e-6));

  // Refinement stability.
  const KernelConstants coarse = kernel_constants(3, 0.75, 5000);
  CHECK(std::abs(coarse.C_Kn - k.C_Kn) / k.C_Kn < 1e-4);

  CHECK_THROWS_AS(kernel_constants(3, 0.0), std::domain_error);
  CHECK_THROWS_AS(kernel_constants(3, 1.0), std::domain_error);
  CHECK_THROWS_AS(kernel_constants(2, 0.5), std::domain_error);
}

TEST_CASE("riesz kernel symmetry and homogeneity") {
  const RieszKernel k(3);
  CHECK(k.c == doctest::Approx(1.0 / (4.0 * kPi)).epsilon(1e-12));
  SplitMix64 rng(5);
  for (int i = 0; i < 50; ++i) {
    std::array<double, 3> x;
    for (auto& c : x) c = rng.uniform(-2.0, 2.0);
    const double lambda = rng.uniform(0.1, 5.0);
    for (int axis = 0; axis < 3; ++axis) {
      const std::array<double, 3> neg = {-x[0], -x[1], -x[2]};
      CHECK(k.component(neg, axis) == doctest::Approx(-k.component(x, axis)));
      const std::array<double, 3> scaled = {lambda * x[0], lambda * x[1], lambda * x[2]};
      CHECK(k.component(scaled, axis) ==
            doctest::Approx(std::pow(lambda, -2.0) * k.component(x, axis))
                .epsilon(1e-10));
    }
  }
}

TEST_CASE("heat kernel: normalization and large-time bound") {
  const HeatKernel heat(1e-2, 3);
  for (const double tau : {0.1, 1.0}) {
    const double mass = integrate_adaptive(
        [&](double r) { return 4.0 * kPi * r * r * heat.value(tau, r); }, 0.0,
        40.0 * std::sqrt(heat.nu * tau) + 5.0, 1e-11);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
  }
  for (const double s : {2.0, 10.0, 100.0})
    CHECK(heat.value(s, 0.0) <= std::pow(4.0 * kPi * heat.nu * s, -1.5) * (1 + 1e-12));
}

TEST_CASE("pointwise Gaussian envelopes hold on sampled radii") {
  const double nu = 1e-3;
  const HeatKernel heat(nu, 3);
  for (const double mu : {0.3, 0.5, 0.9}) {
    const KernelConstants k = kernel_constants(3, mu);
    for (const double tau : {1e-3, 1e-2, 1e-1, 1.0})
      for (int i = 1; i <= 64; ++i) {
        const double r = 0.125 * i;
        CHECK(heat.value(tau, r) <= gaussian_envelope(k, nu, tau, r) * (1 + 1e-12));
      }
  }
  for (const double mu : {0.6, 0.75, 0.9}) {
    const KernelConstants k = kernel_constants(3, mu);
    for (const double tau : {1e-3, 1e-2, 1e-1, 1.0})
      for (int i = 1; i <= 64; ++i) {
        const double r = 0.125 * i;
        CHECK(heat.grad_component(tau, r, r) <=
              gaussian_grad_envelope(k, nu, tau, r) * (1 + 1e-12));
      }
  }
}

TEST_CASE("heat_convolve: mass preservation, semigroup, Gaussian broadening") {
  const GridSpec g(3, 32, 8.0);
  ScalarField c(g, Frame::OriginalX);
  std::fill(c.samples.begin(), c.samples.end(), 1.7);
  const ScalarField out = heat_convolve(c, 1e-2, 0.5);
  double worst = 0.0;
  for (const double v : out.samples) worst = std::max(worst, std::abs(v - 1.7));
  CHECK(worst < 1e-13);

  const ScalarField f = gaussian(g, 1.2);
  const ScalarField once = heat_convolve(f, 2e-2, 0.8);
  const ScalarField twice = heat_convolve(heat_convolve(f, 2e-2, 0.4), 2e-2, 0.4);
  CHECK((once - twice).max_abs() < 1e-10);

  // Variance grows by 2 nu tau (moment oracle at 64^3).
  const GridSpec fine(3, 64, 8.0);
  const double sigma = 0.8, nu = 0.05, tau = 1.2;
  const ScalarField f0 = gaussian(fine, sigma);
  const ScalarField f1 = heat_convolve(f0, nu, tau);
  const auto xs = fine.axis_coords();
  double mass = 0.0, second = 0.0;
  std::size_t idx = 0;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j)
      for (int k = 0; k < 64; ++k, ++idx) {
        mass += f1.samples[idx];
        second += xs[i] * xs[i] * f1.samples[idx];
      }
  CHECK(second / mass ==
        doctest::Approx(sigma * sigma + 2.0 * nu * tau).epsilon(1e-4));

  CHECK_THROWS_AS(heat_convolve(f, 1e-2, 0.0), std::domain_error);
  CHECK_THROWS_AS(heat_convolve(f, 1e-2, -1.0), std::domain_error);

  // Under-resolved kernel flags a warning but still returns.
  const ScalarField warned = heat_convolve(f, 1e-9, 1e-3);
  CHECK((warned.warnings & kWarnKernelUnderResolved) != 0);
  CHECK((once.warnings & kWarnKernelUnderResolved) == 0);
}

TEST_CASE("heat_convolve_grad: annihilates constants, commutes, analytic oracle") {
  const GridSpec g(3, 32, 8.0);
  ScalarField c(g, Frame::OriginalX);
  std::fill(c.samples.begin(), c.samples.end(), 3.3);
  CHECK(heat_convolve_grad(c, 1e-2, 0.5, 0).max_abs() < 1e-13);

  const ScalarField f = gaussian(g, 1.1);
  const ScalarField a = heat_convolve_grad(f, 1e-2, 0.5, 2);
  const ScalarField b = spectral_derivative(heat_convolve(f, 1e-2, 0.5), 2);
  CHECK((a - b).max_abs() < 1e-10);

  // Closed-form oracle: the broadened Gaussian's derivative.
  const GridSpec fine(3, 64, 8.0);
  const double sigma = 0.9, nu = 0.05, tau = 1.0;
  const ScalarField f0 = gaussian(fine, sigma);
  const ScalarField df = heat_convolve_grad(f0, nu, tau, 0);
  const double s2 = sigma * sigma + 2.0 * nu * tau;
  const double amp = std::pow(sigma * sigma / s2, 1.5);
  const auto xs = fine.axis_coords();
  double worst = 0.0;
  for (int i = 8; i < 56; ++i)
    for (int j = 8; j < 56; ++j)
      for (int k = 8; k < 56; ++k) {
        const double r2 = xs[i] * xs[i] + xs[j] * xs[j] + xs[k] * xs[k];
        const double expect = -amp * xs[i] / s2 * std::exp(-r2 / (2.0 * s2));
        worst = std::max(worst, std::abs(df.at(i, j, k) - expect));
      }
  CHECK(worst / df.max_abs() < 1e-4);
}

TEST_CASE("leray projector: annihilation, fixed points, idempotence, self-adjointness") {
  const GridSpec g(3, 32, 8.0);
  const ScalarField phi = gaussian(g, 1.3);

  VectorField grad(g, Frame::OriginalX);
  for (int a = 0; a < 3; ++a) grad.comps[a] = spectral_derivative(phi, a);
  CHECK(leray_project(grad).max_abs() / grad.max_abs() < 1e-10);

  VectorField curl(g, Frame::OriginalX);
  curl.comps[0] = spectral_derivative(phi, 1);
  curl.comps[1] = -1.0 * spectral_derivative(phi, 0);
  const VectorField fixed = leray_project(curl);
  CHECK((fixed - curl).max_abs() / curl.max_abs() < 1e-10);

  SplitMix64 rng(17);
  VectorField mixed(g, Frame::OriginalX);
  for (int a = 0; a < 3; ++a) {
    const double a1 = rng.uniform(-1, 1), a2 = rng.uniform(-1, 1);
    const double w1 = kPi / 8 * (1 + (rng.next_u64() % 4));
    const double w2 = kPi / 8 * (1 + (rng.next_u64() % 4));
    mixed.comps[a] = ScalarField::sample(
        g, Frame::OriginalX, 0.0, [=](double x, double y, double z) {
          return a1 * std::sin(w1 * x) * std::cos(w2 * y) +
                 a2 * std::cos(w1 * z) * std::sin(w2 * x);
        });
  }
  const VectorField once = leray_project(mixed);
  CHECK((leray_project(once) - once).max_abs() / once.max_abs() < 1e-10);
  CHECK(divergence(once).max_abs() / mixed.max_abs() < 1e-8);

  // Self-adjointness on the discrete inner product: <Pu, v> = <u, Pv>.
  VectorField other(g, Frame::OriginalX);
  for (int a = 0; a < 3; ++a) {
    const double a1 = rng.uniform(-1, 1);
    const double w1 = kPi / 8 * (1 + (rng.next_u64() % 4));
    other.comps[a] = ScalarField::sample(
        g, Frame::OriginalX, 0.0, [=](double x, double y, double z) {
          return a1 * std::cos(w1 * (x + 0.3 * y - 0.7 * z));
        });
  }
  const VectorField pu = leray_project(mixed);
  const VectorField pv = leray_project(other);
  double lhs = 0.0, rhs = 0.0, scale = 0.0;
  for (int a = 0; a < 3; ++a)
    for (std::size_t q = 0; q < pu.comps[a].samples.size(); ++q) {
      lhs += pu.comps[a].samples[q] * other.comps[a].samples[q];
      rhs += mixed.comps[a].samples[q] * pv.comps[a].samples[q];
      scale += std::abs(mixed.comps[a].samples[q] * other.comps[a].samples[q]);
    }
  CHECK(std::abs(lhs - rhs) / scale < 1e-8);
}

TEST_CASE("riesz convolution: zero source, odd symmetry, dual-path oracle") {
  const GridSpec g(3, 32, 8.0);
  ScalarField zero(g, Frame::OriginalX);
  CHECK(riesz_convolve(zero, 0).max_abs() == 0.0);

  // Reflecting the source along the kernel axis flips the output sign.
  const ScalarField bump = gaussian(g, 1.0);
  const ScalarField out = riesz_convolve(bump, 0);
  const int N = 32;
  double worst = 0.0;
  for (int i = 1; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        worst = std::max(worst, std::abs(out.at(i, j, k) + out.at(N - i, j, k)));
  CHECK(worst / out.max_abs() < 1e-10);

  // Aliasing warning for a non-decaying source.
  ScalarField flat(g, Frame::OriginalX);
  std::fill(flat.samples.begin(), flat.samples.end(), 1.0);
  CHECK((riesz_convolve(flat, 0).warnings & kWarnAliasingRisk) != 0);
  CHECK((out.warnings & kWarnAliasingRisk) == 0);

  // Dual-implementation oracle on a zero-mean compact bump (Laplacian of a
  // Gaussian): fast path vs direct truncated-kernel quadrature near the peak.
  const double w = 1.4;
  const ScalarField src = ScalarField::sample(
      g, Frame::OriginalX, 0.0, [w](double x, double y, double z) {
        const double r2 = x * x + y * y + z * z;
        const double s2 = w * w;
        return (r2 / (s2 * s2) - 3.0 / s2) * std::exp(-r2 / (2.0 * s2));
      });
  const ScalarField fast = riesz_convolve(src, 1);
  std::vector<std::array<int, 3>> nodes;
  const int c0 = N / 2;
  for (int dj = -5; dj <= 5; dj += 2)
    for (int di = -2; di <= 2; di += 2) nodes.push_back({c0 + di, c0 + dj, c0 + di / 2});
  const auto direct = riesz_convolve_direct(src, 1, nodes);
  double scale = 0.0, diff = 0.0;
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    scale = std::max(scale, std::abs(direct[q]));
    diff = std::max(diff, std::abs(direct[q] -
                                   fast.at(nodes[q][0], nodes[q][1], nodes[q][2])));
  }
  CHECK(diff / scale < 2e-2);  // 32^3 smoke bound; 64^3 runs in acceptance

  // The fast path equals the analytic gradient identity for this source.
  const auto xs = g.axis_coords();
  double worst_an = 0.0;
  for (const auto& node : nodes) {
    const double x0 = xs[node[0]], x1 = xs[node[1]], x2 = xs[node[2]];
    const double r2 = x0 * x0 + x1 * x1 + x2 * x2;
    const double expect = -x1 / (w * w) * std::exp(-r2 / (2.0 * w * w));
    worst_an = std::max(worst_an,
                        std::abs(fast.at(node[0], node[1], node[2]) - expect));
  }
  CHECK(worst_an / fast.max_abs() < 1e-6);
}

TEST_CASE("riesz direct path matches the shell-theorem closed form") {
  // For a radial source, K * f = x / (4 pi r^3) * (mass inside r).
  const GridSpec g(3, 32, 8.0);
  const double w = 1.1;
  const ScalarField src = gaussian(g, w);
  std::vector<std::array<int, 3>> nodes;
  for (int i = 10; i <= 22; i += 2) nodes.push_back({i, 19, 21});
  const auto direct = riesz_convolve_direct(src, 0, nodes);
  const auto xs = g.axis_coords();
  double scale = 0.0, worst = 0.0;
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    const double x0 = xs[nodes[q][0]], x1 = xs[nodes[q][1]], x2 = xs[nodes[q][2]];
    const double r = std::sqrt(x0 * x0 + x1 * x1 + x2 * x2);
    const double mass = integrate_adaptive(
        [w](double u) {
          return 4.0 * kPi * u * u * std::exp(-u * u / (2.0 * w * w));
        },
        0.0, r, 1e-12);
    const double expect = x0 / (4.0 * kPi * r * r * r) * mass;
    scale = std::max(scale, std::abs(expect));
    worst = std::max(worst, std::abs(direct[q] - expect));
  }
  CHECK(worst / scale < 5e-3);
}

TEST_CASE("lipschitz moment bound") {
  const KernelConstants k = kernel_constants(3, 0.75);
  CHECK(lipschitz_moment_bound(0.0, k) == 0.0);
  CHECK(lipschitz_moment_bound(2.0, k) ==
        doctest::Approx(2.0 * lipschitz_moment_bound(1.0, k)).epsilon(1e-14));

  const GridSpec g(3, 32, 8.0);
  ScalarField constant(g, Frame::OriginalX);
  std::fill(constant.samples.begin(), constant.samples.end(), 4.0);
  CHECK(lipschitz_convolution_sup(constant, 1e-2, 0.3) < 1e-12);

  const ScalarField absx = ScalarField::sample(
      g, Frame::OriginalX, 0.0, [](double x, double, double) { return std::abs(x); });
  CHECK(lipschitz_convolution_sup(absx, 1e-2, 0.3) <=
        lipschitz_moment_bound(1.0, k));
}
