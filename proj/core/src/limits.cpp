#include "conelab/limits.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>

#include "conelab/fields.hpp"
#include "conelab/numerics.hpp"

namespace conelab {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

SweepResult viscosity_sweep(const SchemeConfig& base, const VectorField& data,
                            const std::vector<double>& nus, const MarchOptions& opts) {
  if (nus.size() < 2)
    throw std::invalid_argument("viscosity_sweep: need at least two viscosities");
  for (std::size_t i = 1; i < nus.size(); ++i)
    if (!(nus[i] < nus[i - 1]))
      throw std::invalid_argument("viscosity_sweep: nus must be strictly decreasing");

  SweepResult result;
  result.nus = nus;

  // Members are independent; run them concurrently and aggregate in nu order.
  std::vector<std::future<MarchResult>> futures;
  futures.reserve(nus.size());
  for (const double nu : nus) {
    SchemeConfig cfg = base;
    cfg.nu = nu;
    futures.push_back(std::async(std::launch::async, [cfg, &data, &opts]() {
      return time_march(data, cfg, opts);
    }));
  }
  for (std::size_t i = 0; i < nus.size(); ++i) {
    MarchResult march = futures[i].get();
    SweepMember member;
    member.nu = nus[i];
    member.s = march.s;
    member.t = march.t;
    member.center.reserve(march.center.size());
    for (const auto& c : march.center) member.center.push_back(c[0]);
    member.sup_norm = march.sup_combined_norm;
    result.members.push_back(std::move(member));
  }

  // Richardson extrapolation on the three smallest viscosities with the
  // observed order fitted sample-by-sample.
  const std::size_t nmem = result.members.size();
  const auto& c3 = result.members[nmem - 1].center;  // smallest nu
  result.extrapolated = c3;
  result.extrapolation_error.assign(c3.size(), 0.0);
  if (nmem < 3) return result;

  const auto& c1 = result.members[nmem - 3].center;
  const auto& c2 = result.members[nmem - 2].center;
  const double nu1 = result.nus[nmem - 3];
  const double nu2 = result.nus[nmem - 2];
  const double nu3 = result.nus[nmem - 1];

  double scale = 0.0;
  for (const double v : c3) scale = std::max(scale, std::abs(v));
  const double tiny = 1e-12 * std::max(scale, 1.0);

  std::vector<double> orders;
  int monotone = 0, considered = 0;
  for (std::size_t q = 0; q < c3.size(); ++q) {
    const double d12 = c1[q] - c2[q];
    const double d23 = c2[q] - c3[q];
    if (std::abs(d12) < tiny || std::abs(d23) < tiny) continue;
    ++considered;
    if (d12 * d23 > 0.0) ++monotone;
    const double p = std::log(std::abs(d12) / std::abs(d23)) / std::log(nu1 / nu2);
    if (std::isfinite(p)) orders.push_back(std::clamp(p, 0.25, 4.0));
  }

  if (considered == 0) {
    // nu-differences at noise level: the raw series is already converged.
    result.extrapolation_valid = true;
    result.fitted_order = 1.0;
    return result;
  }
  if (orders.empty() || monotone < (3 * considered) / 4) {
    result.extrapolation_valid = false;  // declined: raw series returned
    return result;
  }

  const double p = median(orders);
  result.fitted_order = p;
  const double factor = std::pow(nu2 / nu3, p) - 1.0;
  for (std::size_t q = 0; q < c3.size(); ++q) {
    const double d23 = c2[q] - c3[q];
    const double w0 = c3[q] - d23 / factor;
    result.extrapolation_error[q] = std::abs(w0 - c3[q]);
    result.extrapolated[q] = w0;
  }
  result.extrapolation_valid = true;
  return result;
}

CenterSeries reconstruct_center_series(const std::vector<double>& s,
                                       const std::vector<double>& w_center,
                                       const ConeChart& chart) {
  if (s.size() != w_center.size())
    throw std::invalid_argument("reconstruct_center_series: size mismatch");
  CenterSeries series;
  series.t.reserve(s.size());
  series.v.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double t = chart.t_of_s(s[i]);
    series.t.push_back(t);
    series.v.push_back(w_center[i] / (chart.rho() - t));
  }
  return series;
}

BlowupReport blowup_fit(const CenterSeries& series, const ConeChart& chart) {
  if (series.t.size() < 8)
    throw std::invalid_argument("blowup_fit: series too short");
  const double rho = chart.rho();

  double gap_min = rho, gap_max = 0.0;
  for (const double t : series.t) {
    const double g = rho - t;
    gap_min = std::min(gap_min, g);
    gap_max = std::max(gap_max, g);
  }
  if (!(gap_max / gap_min >= 100.0))
    throw std::invalid_argument(
        "blowup_fit: series must span at least two decades of (rho - t)");

  BlowupReport report;

  bool pos = false, neg = false;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    const double g = rho - series.t[i];
    const double v = series.v[i];
    report.bounded_product = std::max(report.bounded_product, std::abs(v) * g);
    if (g > 100.0 * gap_min) continue;  // final two decades only
    if (v > 0.0) pos = true;
    if (v < 0.0) neg = true;
    if (v == 0.0) continue;
    xs.push_back(-std::log(g));
    ys.push_back(std::log(std::abs(v)));
  }
  report.sign_change_flag = pos && neg;
  if (xs.size() >= 2) {
    const LineFit fit = fit_line(xs, ys);
    report.fitted_order = fit.slope;
    report.fitted_order_ci = fit.slope_stderr;
  }

  // Tip value of w = v (rho - t): final decade, linear drift removed.
  std::vector<double> us, ws;
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    const double g = rho - series.t[i];
    if (g > 10.0 * gap_min) continue;
    us.push_back(g / rho);
    ws.push_back(series.v[i] * g);
  }
  if (us.size() >= 2) {
    const LineFit fit = fit_line(us, ws);
    report.tail_limit_estimate = fit.intercept;
    double u_span = 0.0;
    for (const double u : us) u_span = std::max(u_span, u);
    report.tail_uncertainty = fit.residual_rms + std::abs(fit.slope) * u_span;
  } else if (!ws.empty()) {
    report.tail_limit_estimate = ws.back();
    report.tail_uncertainty = std::abs(ws.back());
  }
  return report;
}

ForcingReport synthesize_forcing(const std::vector<double>& s_slices,
                                 const std::vector<VectorField>& w, double nu,
                                 const ConeChart& chart,
                                 const std::vector<double>& eps_ladder,
                                 bool keep_fields) {
  if (s_slices.size() != w.size() || w.empty())
    throw std::invalid_argument("synthesize_forcing: slice mismatch");
  if (!(nu >= 0.0)) throw std::invalid_argument("synthesize_forcing: nu < 0");

  ForcingReport report;
  report.s = s_slices;
  report.eps_ladder = eps_ladder;

  const GridSpec& g = w.front().spec();
  const int N = g.points_per_axis;
  const auto zs = g.axis_coords();
  std::vector<double> sec2(N);
  for (int i = 0; i < N; ++i) {
    const double c = std::cos(zs[i]);
    sec2[i] = 1.0 / (c * c);
  }

  for (std::size_t l = 0; l < w.size(); ++l) {
    report.t.push_back(chart.t_of_s(s_slices[l]));

    // f^w: the scheme's viscosity term, slice by slice.
    VectorField fw(g, w[l].frame(), s_slices[l]);
    for (int c = 0; c < 3; ++c) {
      fw.comps[c] = spectral_laplacian(w[l].comps[c]);
      for (double& v : fw.comps[c].samples) v *= -nu;
    }
    double fw_sq = 0.0;
    for (const auto& c : fw.comps) {
      const double n2 = c.l2_norm();
      fw_sq += n2 * n2;
    }
    report.fw_slice_l2.push_back(std::sqrt(fw_sq));

    // f^v through the cone-frame Laplacian formula, integrated with the
    // exact original-coordinates measure dx = prod sec^2(z_i) dz.
    VectorField fv = laplacian_via_cone(w[l], chart);
    for (auto& c : fv.comps)
      for (double& v : c.samples) v *= -nu;
    double fv_sq = 0.0;
    std::size_t idx = 0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k, ++idx) {
          const double meas = sec2[i] * sec2[j] * sec2[k];
          double point = 0.0;
          for (int c = 0; c < 3; ++c) {
            const double v = fv.comps[c].samples[idx];
            point += v * v;
          }
          fv_sq += point * meas;
        }
    report.fv_slice_l2sq.push_back(fv_sq * g.cell_volume());

    if (keep_fields) {
      report.f_w.push_back(std::move(fw));
      report.f_v.push_back(std::move(fv));
    }
  }

  // Time integral int_0^{rho - eps} |f^v(t)|^2 dt by trapezoid on the slice
  // times, per ladder entry.
  for (const double eps : eps_ladder) {
    const double t_end = chart.rho() - eps;
    double acc = 0.0;
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
      const double t0 = report.t[l], t1 = report.t[l + 1];
      if (t0 >= t_end) break;
      const double hi = std::min(t1, t_end);
      double f1 = report.fv_slice_l2sq[l + 1];
      if (t1 > t_end && t1 > t0)
        f1 = report.fv_slice_l2sq[l] +
             (report.fv_slice_l2sq[l + 1] - report.fv_slice_l2sq[l]) *
                 ((t_end - t0) / (t1 - t0));
      acc += 0.5 * (report.fv_slice_l2sq[l] + f1) * (hi - t0);
    }
    report.fv_l2.push_back(std::sqrt(acc));
  }
  return report;
}

}  // namespace conelab
