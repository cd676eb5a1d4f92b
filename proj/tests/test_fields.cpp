#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "conelab/fields.hpp"
#include "conelab/kernels.hpp"
#include "conelab/norms.hpp"
#include "conelab/numerics.hpp"
#include "conelab/snapshot.hpp"

using namespace conelab;

namespace {

constexpr double kPi = std::numbers::pi;

double cos_bump(double r, double R) {
  if (r >= R) return 0.0;
  const double c = std::cos(kPi * r / (2.0 * R));
  return c * c * c * c;
}

ScalarField radial_bump(const GridSpec& g, Frame frame, double R) {
  return ScalarField::sample(g, frame, 0.0, [R](double a, double b, double c) {
    return cos_bump(std::sqrt(a * a + b * b + c * c), R);
  });
}

}  // namespace

TEST_CASE("grid construction rules") {
  CHECK_THROWS_AS(GridSpec(2, 32, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(3, 8, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(3, 24, 1.0), std::invalid_argument);  // not a power of two
  CHECK_THROWS_AS(GridSpec(3, 32, 0.0), std::invalid_argument);
  const GridSpec g(3, 32, 2.0);
  CHECK(g.coord(16) == 0.0);  // the origin is a node
  const GridSpec cyl = cylinder_grid(32);
  CHECK(cyl.half_extent < kPi / 2.0);
  CHECK(cyl.coord(0) > -kPi / 2.0);
}

TEST_CASE("sobolev and C^m norms") {
  const GridSpec g(3, 32, 4.0);
  ScalarField zero(g, Frame::OriginalX);
  const NormReport rz = sobolev_cm_norm(zero, 2);
  CHECK(rz.sobolev == 0.0);
  CHECK(rz.sup_cm == 0.0);

  const GridSpec fine(3, 64, 8.0);
  const ScalarField f = ScalarField::sample(
      fine, Frame::OriginalX, 0.0, [](double x, double y, double z) {
        return std::exp(-(x * x + y * y + z * z));
      });
  const NormReport r0 = sobolev_cm_norm(f, 0);
  CHECK(r0.sobolev ==
        doctest::Approx(std::sqrt(std::pow(kPi / 2.0, 1.5))).epsilon(1e-4));
  const NormReport r1 = sobolev_cm_norm(f, 1);
  CHECK(r1.sobolev >= r0.sobolev);
  CHECK(sobolev_cm_norm(f, 2).sobolev >= r1.sobolev);
  CHECK(r0.sup_cm == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(sobolev_cm_norm(f, -1), std::domain_error);
}

TEST_CASE("decay class windows") {
  const GridSpec g(3, 64, 8.0);
  const ScalarField gauss = ScalarField::sample(
      g, Frame::OriginalX, 0.0, [](double x, double y, double z) {
        return std::exp(-(x * x + y * y + z * z) / (2.0 * 0.25));
      });
  // Super-polynomial decay passes every testable order.
  for (const int l : {2, 4, 8})
    for (const int m : {0, 1, 2}) CHECK(decay_class_check(gauss, l, m).pass);

  const ScalarField rational = ScalarField::sample(
      g, Frame::OriginalX, 0.0, [](double x, double y, double z) {
        return 1.0 / (1.0 + x * x + y * y + z * z);
      });
  CHECK(decay_class_check(rational, 2, 0).pass);
  CHECK(!decay_class_check(rational, 3, 0).pass);

  // Monotonicity: passing (l, m) implies passing lower l.
  CHECK(decay_class_check(rational, 1, 0).pass);

  // Product law: two (2, 0)-passing fields multiply to a (4, 0) pass.
  ScalarField product = rational;
  for (std::size_t q = 0; q < product.samples.size(); ++q)
    product.samples[q] *= rational.samples[q];
  CHECK(decay_class_check(product, 4, 0).pass);

  // A grid that does not reach past |x| = 1 is rejected.
  const GridSpec small(3, 16, 0.5);
  ScalarField s(small, Frame::OriginalX);
  CHECK_THROWS_AS(decay_class_check(s, 2, 0), std::domain_error);
  // Wrong frame is rejected.
  ScalarField wrong(g, Frame::CylinderZ);
  CHECK_THROWS_AS(decay_class_check(wrong, 2, 0), std::domain_error);
}

TEST_CASE("gaussian data: center value, symmetry, gradient scale") {
  const ConeChart chart(3, 0.02);
  const GaussianData data = make_gaussian_data(chart, 64, 32);

  CHECK(data.a == doctest::Approx(1.0 / std::pow(0.02, 3.0)).epsilon(1e-14));
  const int N = 32;
  CHECK(data.h_rho.comps[0].at(N / 2, N / 2, N / 2) == 1.0);
  const int Nx = 64;
  CHECK(data.h.comps[0].at(Nx / 2, Nx / 2, Nx / 2) ==
        doctest::Approx(1.0 / 0.02).epsilon(1e-14));

  // Reflection symmetry h(y) = h(y^-j).
  const auto& f = data.h_rho.comps[0];
  double asym = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      asym = std::max(asym, std::abs(f.at(i, j, 1) - f.at(i, j, N - 1)));
      asym = std::max(asym, std::abs(f.at(1, i, j) - f.at(N - 1, i, j)));
    }
  CHECK(asym < 1e-14);

  // max_j sup |d_j h| = sqrt(2 rho) e^{-1/2} <= sqrt(2) sqrt(rho).
  double sup_grad = 0.0;
  for (int axis = 0; axis < 3; ++axis)
    sup_grad =
        std::max(sup_grad, spectral_derivative(data.h.comps[0], axis).max_abs());
  const double expected = std::sqrt(2.0 * 0.02) * std::exp(-0.5);
  CHECK(sup_grad == doctest::Approx(expected).epsilon(2e-2));
  CHECK(sup_grad <= std::sqrt(2.0) * std::sqrt(0.02));

  CHECK(mass_outside_cone_base(data.h_rho.comps[0], chart) < 1e-8);
}

TEST_CASE("push and pull velocity") {
  const ConeChart chart(3, 0.1);
  const double t0 = 0.03;
  const double s0 = chart.s_of_t(t0);

  SUBCASE("constant slice w = rho - t maps to v = 1") {
    const GridSpec zg = cylinder_grid(16);
    VectorField w(zg, Frame::CylinderZ, s0);
    for (auto& c : w.comps)
      std::fill(c.samples.begin(), c.samples.end(), chart.rho() - t0);
    const GridSpec xg(3, 16, 4.0);
    const VectorField v = push_velocity(w, chart, xg);
    double worst = 0.0;
    for (const double q : v.comps[0].samples) worst = std::max(worst, std::abs(q - 1.0));
    CHECK(worst < 1e-12);
  }

  SUBCASE("round trip at 1e-4 and refinement order >= 3") {
    double errs[2];
    const int sizes[2] = {64, 128};
    for (int pass = 0; pass < 2; ++pass) {
      const GridSpec zg = cylinder_grid(sizes[pass]);
      VectorField w;
      w.comps.push_back(radial_bump(zg, Frame::CylinderZ, 1.4));
      w.comps[0].time_tag = s0;
      const GridSpec xg(3, 2 * sizes[pass], 6.0);
      const VectorField v = push_velocity(w, chart, xg);
      const VectorField back = pull_velocity(v, chart, sizes[pass]);
      errs[pass] = (back - w).max_abs() / w.max_abs();
    }
    CHECK(errs[1] < 1e-4);
    CHECK(std::log2(errs[0] / errs[1]) >= 2.5);
  }

  SUBCASE("push at the center equals the stored sample over rho - t") {
    const GridSpec zg = cylinder_grid(32);
    VectorField w;
    w.comps.push_back(radial_bump(zg, Frame::CylinderZ, 1.2));
    w.comps[0].time_tag = s0;
    const GridSpec xg(3, 32, 4.0);
    const VectorField v = push_velocity(w, chart, xg);
    const double expected = w.comps[0].at(16, 16, 16) / (chart.rho() - t0);
    CHECK(v.comps[0].at(16, 16, 16) == doctest::Approx(expected).epsilon(1e-12));
  }

  SUBCASE("domain and frame errors") {
    const GridSpec xg(3, 16, 4.0);
    VectorField vx(xg, Frame::OriginalX, 0.2);  // t >= rho
    CHECK_THROWS_AS(pull_velocity(vx, chart, 16), std::domain_error);
    CHECK_THROWS_AS(push_velocity(vx, chart, xg), std::invalid_argument);
  }
}

TEST_CASE("laplacian through the cone formula") {
  const ConeChart chart(3, 0.1);
  const double t0 = 0.03;
  const double s0 = chart.s_of_t(t0);

  // Spatially constant w has zero Laplacian.
  const GridSpec zg = cylinder_grid(16);
  VectorField w(zg, Frame::CylinderZ, s0);
  for (auto& c : w.comps) std::fill(c.samples.begin(), c.samples.end(), 2.0);
  CHECK(laplacian_via_cone(w, chart).max_abs() < 1e-12);

  // Dual path: formula vs direct Laplacian of the analytic push.
  const double R = 1.4;
  const GridSpec zfine = cylinder_grid(128);
  VectorField wb;
  wb.comps.push_back(radial_bump(zfine, Frame::CylinderZ, R));
  wb.comps[0].time_tag = s0;
  const GridSpec xg(3, 64, 6.0);
  ScalarField v = ScalarField::sample(
      xg, Frame::OriginalX, t0, [R](double x0, double x1, double x2) {
        const double z0 = std::atan(x0), z1 = std::atan(x1), z2 = std::atan(x2);
        return cos_bump(std::sqrt(z0 * z0 + z1 * z1 + z2 * z2), R);
      });
  for (double& q : v.samples) q /= (chart.rho() - t0);

  const auto xs = xg.axis_coords();
  std::vector<double> zq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) zq[i] = std::atan(xs[i]);
  const VectorField lap_formula = laplacian_via_cone(wb, chart);
  const ScalarField lap_at_x = resample_monotone(
      lap_formula.comps[0], xg, Frame::OriginalX, t0, {zq, zq, zq}, true);
  const ScalarField lap_direct = spectral_laplacian(v);
  CHECK((lap_direct - lap_at_x).max_abs() / lap_direct.max_abs() < 1e-3);
}

TEST_CASE("divergence identities") {
  const GridSpec g(3, 32, 6.0);
  const ScalarField phi = ScalarField::sample(
      g, Frame::OriginalX, 0.0, [](double x, double y, double z) {
        return std::exp(-(x * x + y * y + z * z) / 2.0);
      });
  VectorField grad(g, Frame::OriginalX);
  for (int a = 0; a < 3; ++a) grad.comps[a] = spectral_derivative(phi, a);
  const ScalarField div = divergence(grad);
  const ScalarField lap = spectral_laplacian(phi);
  CHECK((div - lap).max_abs() / lap.max_abs() < 1e-8);

  VectorField zero(g, Frame::OriginalX);
  CHECK(divergence(zero).max_abs() == 0.0);
}

TEST_CASE("snapshot round trip is byte-stable") {
  const GridSpec g(3, 16, 1.5);
  VectorField f(g, Frame::CylinderZ, 0.75);
  SplitMix64 rng(99);
  for (auto& c : f.comps)
    for (auto& v : c.samples) v = rng.uniform(-2.0, 2.0);

  const std::filesystem::path path = "snapshot_test.snap";
  write_snapshot(path, f, 0.02, 1e-2);
  const Snapshot snap = read_snapshot(path);
  CHECK(snap.rho == 0.02);
  CHECK(snap.nu == 1e-2);
  CHECK(snap.field.frame() == Frame::CylinderZ);
  CHECK(snap.field.time_tag() == 0.75);
  CHECK(snap.field.spec() == g);
  for (int c = 0; c < 3; ++c)
    for (std::size_t q = 0; q < g.size(); ++q)
      CHECK(snap.field.comps[c].samples[q] == f.comps[c].samples[q]);

  // Writing the same field twice produces identical bytes.
  const std::filesystem::path path2 = "snapshot_test2.snap";
  write_snapshot(path2, f, 0.02, 1e-2);
  std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
  const std::string sa((std::istreambuf_iterator<char>(a)),
                       std::istreambuf_iterator<char>());
  const std::string sb((std::istreambuf_iterator<char>(b)),
                       std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  CHECK(sa.size() == 72 + 3 * g.size() * 8);
  CHECK(sa.substr(0, 8) == "CONEW001");
  std::filesystem::remove(path);
  std::filesystem::remove(path2);

  CHECK_THROWS(read_snapshot("no_such_file.snap"));
}
