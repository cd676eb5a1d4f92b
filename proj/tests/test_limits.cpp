#include <doctest.h>

#include <cmath>

#include "conelab/fields.hpp"
#include "conelab/kernels.hpp"
#include "conelab/limits.hpp"
#include "conelab/scheme.hpp"

using namespace conelab;

namespace {

SchemeConfig base_config(double rho, int points = 16) {
  const ConeChart chart(3, rho);
  SchemeConfig cfg(chart, cylinder_grid(points));
  cfg.m = 2;
  cfg.ds = 0.05;
  cfg.k_max = 4;
  cfg.fp_tol = 1e-10;
  return cfg;
}

}  // namespace

TEST_CASE("viscosity sweep with all terms off reproduces the data center") {
  SchemeConfig cfg = base_config(0.02);
  cfg.toggles = TermToggles{false, false, false, false};
  cfg.s_max = 2.0;
  const GaussianData data = make_gaussian_data(cfg.chart, 64, 16);
  const std::vector<double> nus = {4e-2, 2e-2, 1e-2};
  const SweepResult sweep = viscosity_sweep(cfg, data.h_rho, nus, MarchOptions{0, 8});

  REQUIRE(sweep.members.size() == 3);
  // nu-halving differences shrink by a stable factor (observed order >= 1).
  const auto& c1 = sweep.members[0].center;
  const auto& c2 = sweep.members[1].center;
  const auto& c3 = sweep.members[2].center;
  const std::size_t mid = c1.size() / 2;
  const double d12 = std::abs(c1[mid] - c2[mid]);
  const double d23 = std::abs(c2[mid] - c3[mid]);
  CHECK(d23 < d12);
  CHECK(d12 / d23 > 1.6);  // order >= 1 under nu halving

  // Extrapolation reproduces the un-smoothed data at the center within 1e-3.
  CHECK(sweep.extrapolation_valid);
  double worst = 0.0;
  for (const double v : sweep.extrapolated) worst = std::max(worst, std::abs(v - 1.0));
  CHECK(worst < 1e-3);

  // Sup norms bounded uniformly in nu.
  double lo = 1e300, hi = 0.0;
  for (const auto& m : sweep.members) {
    lo = std::min(lo, m.sup_norm);
    hi = std::max(hi, m.sup_norm);
  }
  CHECK(hi <= 1.2 * lo);

  CHECK_THROWS_AS(viscosity_sweep(cfg, data.h_rho, {1e-2}, MarchOptions{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(viscosity_sweep(cfg, data.h_rho, {1e-2, 2e-2}, MarchOptions{}),
                  std::invalid_argument);
}

TEST_CASE("reconstruct center series") {
  const ConeChart chart(3, 0.1);
  std::vector<double> s, w;
  for (int i = 0; i <= 50; ++i) {
    s.push_back(0.2 * i);
    w.push_back(0.7);  // constant w
  }
  const CenterSeries series = reconstruct_center_series(s, w, chart);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double expect = 0.7 / (0.1 - series.t[i]);
    CHECK(series.v[i] == doctest::Approx(expect).epsilon(1e-14));
  }
  CHECK_THROWS_AS(reconstruct_center_series({0.0}, {}, chart), std::invalid_argument);
}

TEST_CASE("blowup fit on synthetic series") {
  const ConeChart chart(3, 0.1);
  const double rho = 0.1;

  auto make_series = [&](auto v_of_gap) {
    CenterSeries series;
    for (int i = 0; i <= 400; ++i) {
      const double gap = rho * std::pow(10.0, -3.0 * i / 400.0);  // 3 decades
      series.t.push_back(rho - gap);
      series.v.push_back(v_of_gap(gap));
    }
    return series;
  };

  SUBCASE("exact hyperbola A / (rho - t)") {
    const double A = 0.35;
    const BlowupReport rep =
        blowup_fit(make_series([&](double g) { return A / g; }), chart);
    CHECK(std::abs(rep.fitted_order - 1.0) <= 1e-3);
    CHECK(rep.bounded_product == doctest::Approx(A).epsilon(1e-12));
    CHECK(rep.tail_limit_estimate == doctest::Approx(A).epsilon(1e-10));
    CHECK(!rep.sign_change_flag);
  }

  SUBCASE("square-root singularity") {
    const BlowupReport rep =
        blowup_fit(make_series([](double g) { return 2.0 / std::sqrt(g); }), chart);
    CHECK(std::abs(rep.fitted_order - 0.5) <= 1e-2);
  }

  SUBCASE("bounded series: order near zero and vanishing product") {
    const BlowupReport rep =
        blowup_fit(make_series([](double g) { return 3.0 + 0.1 * g; }), chart);
    CHECK(std::abs(rep.fitted_order) <= 1e-2);
    // sup |v| (rho - t) is attained at the largest gap and is small.
    CHECK(rep.bounded_product <= 3.1 * rho);
    CHECK(std::abs(rep.tail_limit_estimate) < 1e-3);
  }

  SUBCASE("sign change flags the fit") {
    const BlowupReport rep = blowup_fit(
        make_series([&](double g) { return (g > rho * 1e-2) ? 1.0 / g : -1.0 / g; }),
        chart);
    CHECK(rep.sign_change_flag);
  }

  SUBCASE("series must span two decades") {
    CenterSeries narrow;
    for (int i = 0; i <= 40; ++i) {
      const double gap = rho * (1.0 - 0.5 * i / 40.0);
      narrow.t.push_back(rho - gap);
      narrow.v.push_back(1.0 / gap);
    }
    CHECK_THROWS_AS(blowup_fit(narrow, chart), std::invalid_argument);
  }
}

TEST_CASE("forcing synthesis: linearity and decay-backed Cauchy trend") {
  const ConeChart chart(3, 0.05);
  const GridSpec g = cylinder_grid(16);

  // Synthetic trajectory with the (rho - t) decay the damping produces.
  std::vector<double> s;
  std::vector<VectorField> w;
  const ScalarField profile = ScalarField::sample(
      g, Frame::CylinderZ, 0.0, [](double a, double b, double c) {
        return std::exp(-(a * a + b * b + c * c) / 0.5);
      });
  for (int l = 0; l <= 60; ++l) {
    const double sl = 0.5 * l;
    s.push_back(sl);
    const double t = chart.t_of_s(sl);
    VectorField slice(g, Frame::CylinderZ, sl);
    for (auto& comp : slice.comps) {
      comp = profile;
      for (double& v : comp.samples) v *= (chart.rho() - t) / chart.rho();
      comp.time_tag = sl;
    }
    w.push_back(std::move(slice));
  }

  const std::vector<double> ladder = {1e-2 * chart.rho(), 1e-3 * chart.rho(),
                                      1e-4 * chart.rho()};
  const ForcingReport a = synthesize_forcing(s, w, 1e-2, chart, ladder);
  const ForcingReport b = synthesize_forcing(s, w, 2e-2, chart, ladder);

  // nu = 0 gives identically zero forcing.
  const ForcingReport zero = synthesize_forcing(s, w, 0.0, chart, ladder, true);
  for (const auto& f : zero.f_w) CHECK(f.max_abs() == 0.0);
  for (const auto& f : zero.f_v) CHECK(f.max_abs() == 0.0);

  // Exact linearity in nu.
  for (std::size_t i = 0; i < a.fv_l2.size(); ++i)
    CHECK(b.fv_l2[i] == doctest::Approx(2.0 * a.fv_l2[i]).epsilon(1e-12));
  for (std::size_t i = 0; i < a.fw_slice_l2.size(); ++i)
    CHECK(b.fw_slice_l2[i] == doctest::Approx(2.0 * a.fw_slice_l2[i]).epsilon(1e-12));

  // Ladder entries are increasing and Cauchy: successive differences shrink.
  CHECK(a.fv_l2[1] >= a.fv_l2[0]);
  CHECK(a.fv_l2[2] >= a.fv_l2[1]);
  CHECK(a.fv_l2[2] - a.fv_l2[1] < a.fv_l2[1] - a.fv_l2[0]);
}

TEST_CASE("reconstruction identity: push at the center equals the series") {
  const ConeChart chart(3, 0.05);
  SchemeConfig cfg = base_config(0.05);
  cfg.nu = 1e-2;
  cfg.s_max = 1.0;
  const GaussianData data = make_gaussian_data(chart, 64, 16);
  const MarchResult march = time_march(data.h_rho, cfg, MarchOptions{4, 0});

  std::vector<double> centers;
  std::vector<double> s_at;
  const int N = cfg.grid.points_per_axis;
  for (std::size_t i = 0; i < march.stored_slices.size(); ++i) {
    centers.push_back(march.stored_slices[i].comps[0].samples[cfg.grid.index(
        N / 2, N / 2, N / 2)]);
    s_at.push_back(march.stored_s[i]);
  }
  const CenterSeries series = reconstruct_center_series(s_at, centers, chart);
  const GridSpec xg(3, 16, 4.0);
  for (std::size_t i = 0; i < march.stored_slices.size(); ++i) {
    const VectorField v = push_velocity(march.stored_slices[i], chart, xg);
    CHECK(std::abs(v.comps[0].at(8, 8, 8) - series.v[i]) <=
          1e-10 * std::max(1.0, std::abs(series.v[i])));
  }
}
