#include "conelab/scheme.hpp"

#include <algorithm>
#include <cmath>

#include "conelab/fft.hpp"
#include "conelab/numerics.hpp"

namespace conelab {

namespace {

constexpr double kDivergenceFactor = 1e6;

struct AxisTables {
  std::vector<double> z;
  std::vector<double> tanz;
  std::vector<double> cos2;
  std::vector<double> sec2;
};

AxisTables axis_tables(const GridSpec& g) {
  AxisTables t;
  t.z = g.axis_coords();
  const int N = g.points_per_axis;
  t.tanz.resize(N);
  t.cos2.resize(N);
  t.sec2.resize(N);
  for (int i = 0; i < N; ++i) {
    t.tanz[i] = std::tan(t.z[i]);
    const double c = std::cos(t.z[i]);
    t.cos2[i] = c * c;
    t.sec2[i] = 1.0 / (c * c);
  }
  return t;
}

std::vector<double> xi2_table(const GridSpec& g) {
  const auto xi = spectral::wavenumbers(g);
  const int N = g.points_per_axis;
  const int nk = N / 2 + 1;
  std::vector<double> xi2(static_cast<std::size_t>(N) * N * nk);
  std::size_t idx = 0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < nk; ++k, ++idx)
        xi2[idx] = xi[i] * xi[i] + xi[j] * xi[j] + xi[k] * xi[k];
  return xi2;
}

double damping_mu(const ConeChart& chart, double s, bool damping_on) {
  if (!damping_on) return 1.0;
  // exp(-int_0^s damping coeff) = (rho - t(s)) / rho, the exact integrating
  // factor of the zeroth-order term.
  return (chart.rho() - chart.t_of_s(s)) / chart.rho();
}

VectorField heat_data(const VectorField& data, double nu, double s) {
  if (s <= 0.0) return data;
  return heat_convolve(data, nu, s);
}

void check_divergence(const VectorField& w, double data_scale, int slice, int sweep) {
  if (!w.all_finite() || w.max_abs() > kDivergenceFactor * std::max(data_scale, 1e-300))
    throw DivergedError("scheme diverged at slice " + std::to_string(slice) +
                            " (sweep " + std::to_string(sweep) +
                            "); check rho, ds, and the data amplitude",
                        slice, sweep);
}

}  // namespace

double SchemeConfig::default_s_max(const ConeChart& chart) {
  const double t_end = chart.rho() * (1.0 - 1e-3);
  return chart.s_of_t(t_end);
}

void SchemeConfig::validate() const {
  if (!(nu > 0.0))
    throw std::invalid_argument("SchemeConfig: nu must be positive here (the nu -> 0 "
                                "limit lives in the sweep module)");
  if (!(ds > 0.0)) throw std::invalid_argument("SchemeConfig: ds must be positive");
  if (k_max < 1) throw std::invalid_argument("SchemeConfig: k_max must be >= 1");
  if (!(fp_tol > 0.0)) throw std::invalid_argument("SchemeConfig: fp_tol must be positive");
  if (m < 0) throw std::invalid_argument("SchemeConfig: m must be nonnegative");
}

VectorField assemble_rhs(const VectorField& w, double s, const SchemeConfig& cfg) {
  const ConeChart& chart = cfg.chart;
  const double t = chart.t_of_s(s);
  const double rt = chart.rho() - t;
  const GridSpec& g = w.spec();
  const int N = g.points_per_axis;
  const AxisTables ax = axis_tables(g);

  // The equation is discretized on the fixed cylinder coordinates: the
  // printed coefficients apply to the stored-grid derivatives d/dz. (The
  // y <-> z scaling enters only where fields change frames.)
  std::array<std::array<ScalarField, 3>, 3> deriv;  // deriv[j][i] = d_j w_i (in z)
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) deriv[j][i] = spectral_derivative(w.comps[i], j);

  VectorField F(g, Frame::CylinderZ, s);

  if (cfg.toggles.burgers) {
    const double cB = chart.coeff(CoeffKind::Burgers, t);
    for (int i = 0; i < 3; ++i) {
      std::size_t idx = 0;
      for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
          for (int c = 0; c < N; ++c, ++idx) {
            const std::array<int, 3> node = {a, b, c};
            double term = 0.0;
            for (int j = 0; j < 3; ++j)
              term += ax.cos2[node[j]] * w.comps[j].samples[idx] *
                      deriv[j][i].samples[idx];
            F.comps[i].samples[idx] -= cB * term;
          }
    }
  }

  if (cfg.toggles.convection) {
    const CoeffKind kind = (cfg.convection_variant == ConvectionVariant::PrintedA)
                               ? CoeffKind::Convection
                               : CoeffKind::Burgers;
    const double cC = chart.coeff(kind, t);
    for (int i = 0; i < 3; ++i) {
      std::size_t idx = 0;
      for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
          for (int c = 0; c < N; ++c, ++idx) {
            const std::array<int, 3> node = {a, b, c};
            double term = 0.0;
            for (int j = 0; j < 3; ++j)
              term += ax.z[node[j]] * deriv[j][i].samples[idx];
            F.comps[i].samples[idx] += cC * term;
          }
    }
  }

  if (cfg.toggles.leray) {
    const double cL = chart.coeff(CoeffKind::Leray, t);
    (void)rt;
    // Strain contraction with the measure factors: the cylinder change of
    // variables cancels (rho - t)^n dz*, leaving prod(1 + x_l^2) against the
    // pair weights 1 / ((1 + x_j^2)(1 + x_m^2)).
    ScalarField S(g, Frame::CylinderZ, s);
    std::size_t idx = 0;
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b)
        for (int c = 0; c < N; ++c, ++idx) {
          const std::array<int, 3> node = {a, b, c};
          double contraction = 0.0;
          for (int j = 0; j < 3; ++j)
            for (int m = 0; m < 3; ++m)
              contraction += deriv[j][m].samples[idx] * ax.cos2[node[j]] *
                             deriv[m][j].samples[idx] * ax.cos2[node[m]];
          const double prod_sec = ax.sec2[a] * ax.sec2[b] * ax.sec2[c];
          S.samples[idx] = prod_sec * contraction;
        }
    for (int i = 0; i < 3; ++i) {
      const ScalarField conv = riesz_convolve(S, i);
      for (std::size_t q = 0; q < conv.samples.size(); ++q)
        F.comps[i].samples[q] += cL * conv.samples[q];
    }
  }

  return F;
}

std::vector<VectorField> duhamel_rhs(const std::vector<VectorField>& w_prev,
                                     const std::vector<double>& s_slices,
                                     const SchemeConfig& cfg) {
  const std::size_t L = s_slices.size();
  if (w_prev.size() != L)
    throw std::invalid_argument("duhamel_rhs: trajectory/slice count mismatch");
  const GridSpec& g = cfg.grid;
  const double ds = cfg.ds;

  // Slice assemblies, in spectral form.
  std::vector<std::array<spectral::Spectrum, 3>> fhat(L);
  for (std::size_t l = 0; l < L; ++l) {
    const VectorField F = assemble_rhs(w_prev[l], s_slices[l], cfg);
    for (int c = 0; c < 3; ++c) fhat[l][c] = spectral::forward(F.comps[c]);
  }

  const auto xi2 = xi2_table(g);
  const std::size_t nk = xi2.size();

  // Heat decay over the half-integer gaps (l - j - 1/2) ds.
  std::vector<std::vector<double>> decay(L);
  for (std::size_t d = 1; d < L; ++d) {
    decay[d].resize(nk);
    const double tau = (static_cast<double>(d) - 0.5) * ds;
    for (std::size_t q = 0; q < nk; ++q) decay[d][q] = std::exp(-cfg.nu * tau * xi2[q]);
  }

  std::vector<double> mu(L), mu_mid(L > 0 ? L - 1 : 0);
  for (std::size_t l = 0; l < L; ++l)
    mu[l] = damping_mu(cfg.chart, s_slices[l], cfg.toggles.damping);
  for (std::size_t j = 0; j + 1 < L; ++j)
    mu_mid[j] = damping_mu(cfg.chart, 0.5 * (s_slices[j] + s_slices[j + 1]),
                           cfg.toggles.damping);

  std::vector<VectorField> out;
  out.reserve(L);
  for (std::size_t l = 0; l < L; ++l) {
    if (l == 0) {
      out.emplace_back(g, Frame::CylinderZ, s_slices[0]);
      continue;
    }
    std::array<spectral::Spectrum, 3> acc;
    for (int c = 0; c < 3; ++c) {
      acc[c] = fhat[0][c];
      std::fill(acc[c].data.begin(), acc[c].data.end(), std::complex<double>(0.0));
      acc[c].time_tag = s_slices[l];
    }
    for (std::size_t j = 0; j + 1 <= l; ++j) {
      const double weight = ds * mu[l] / mu_mid[j];
      const auto& dec = decay[l - j];
      for (int c = 0; c < 3; ++c) {
        const auto& a = fhat[j][c].data;
        const auto& b = fhat[j + 1][c].data;
        auto& dst = acc[c].data;
        for (std::size_t q = 0; q < nk; ++q)
          dst[q] += (0.5 * weight * dec[q]) * (a[q] + b[q]);
      }
    }
    VectorField contribution(g, Frame::CylinderZ, s_slices[l]);
    for (int c = 0; c < 3; ++c) contribution.comps[c] = spectral::inverse(acc[c]);
    out.push_back(std::move(contribution));
  }
  return out;
}

IterationState init_whole_interval(const VectorField& data, const SchemeConfig& cfg,
                                   double s_range) {
  cfg.validate();
  if (!(s_range > 0.0))
    throw std::invalid_argument("init_whole_interval: s_range must be positive");
  IterationState state;
  const int L = std::max(2, static_cast<int>(std::round(s_range / cfg.ds)) + 1);
  state.s_slices.resize(L);
  for (int l = 0; l < L; ++l) state.s_slices[l] = l * cfg.ds;
  state.w.reserve(L);
  for (int l = 0; l < L; ++l)
    state.w.push_back(heat_data(data, cfg.nu, state.s_slices[l]));
  state.k = 0;
  return state;
}

void picard_sweep(IterationState& state, const VectorField& data,
                  const SchemeConfig& cfg) {
  const std::size_t L = state.s_slices.size();
  const double data_scale = data.max_abs();

  const auto contributions = duhamel_rhs(state.w, state.s_slices, cfg);

  std::vector<VectorField> w_next;
  w_next.reserve(L);
  double inc_hm = 0.0, inc_cm = 0.0;
  for (std::size_t l = 0; l < L; ++l) {
    const double mu_l = damping_mu(cfg.chart, state.s_slices[l], cfg.toggles.damping);
    VectorField wl = mu_l * heat_data(data, cfg.nu, state.s_slices[l]);
    wl = wl + contributions[l];
    wl.set_time_tag(state.s_slices[l]);
    check_divergence(wl, data_scale, static_cast<int>(l), state.k + 1);
    const NormReport r = sobolev_cm_norm(wl - state.w[l], cfg.m);
    inc_hm = std::max(inc_hm, r.sobolev);
    inc_cm = std::max(inc_cm, r.sup_cm);
    w_next.push_back(std::move(wl));
  }

  SweepRecord rec;
  rec.k = state.k + 1;
  rec.increment_hm = inc_hm;
  rec.increment_cm = inc_cm;
  rec.increment = std::max(inc_hm, inc_cm);
  if (!state.increments.empty() && state.increments.back().increment > 0.0)
    rec.ratio = rec.increment / state.increments.back().increment;
  state.increments.push_back(rec);
  state.w = std::move(w_next);
  state.k += 1;
  state.converged = rec.increment <= cfg.fp_tol * std::max(1.0, data_scale);
}

IterationState run_whole_interval(const VectorField& data, const SchemeConfig& cfg,
                                  double s_range) {
  IterationState state = init_whole_interval(data, cfg, s_range);
  for (int k = 0; k < cfg.k_max && !state.converged; ++k)
    picard_sweep(state, data, cfg);
  return state;
}

MarchResult time_march(const VectorField& data, const SchemeConfig& cfg,
                       const MarchOptions& opts) {
  cfg.validate();
  const double s_end = cfg.resolved_s_max();
  const int steps = std::max(1, static_cast<int>(std::ceil(s_end / cfg.ds)));
  const double ds = s_end / steps;
  const GridSpec& g = cfg.grid;
  const int N = g.points_per_axis;
  const std::size_t center = g.index(N / 2, N / 2, N / 2);
  const double data_scale = data.max_abs();

  SchemeConfig step_cfg = cfg;
  step_cfg.ds = ds;

  MarchResult result;
  auto record = [&](double s, const VectorField& w, int step_index) {
    result.s.push_back(s);
    result.t.push_back(cfg.chart.t_of_s(s));
    result.center.push_back({w.comps[0].samples[center], w.comps[1].samples[center],
                             w.comps[2].samples[center]});
    if (opts.norm_stride > 0 && step_index % opts.norm_stride == 0) {
      const double norm = sobolev_cm_norm(w, cfg.m).combined();
      result.norm_samples_s.push_back(s);
      result.norm_samples.push_back(norm);
      result.sup_combined_norm = std::max(result.sup_combined_norm, norm);
    }
    if (opts.store_stride > 0 && step_index % opts.store_stride == 0) {
      result.stored_s.push_back(s);
      result.stored_slices.push_back(w);
    }
  };

  VectorField w = data;
  w.set_time_tag(0.0);
  record(0.0, w, 0);

  for (int l = 0; l < steps; ++l) {
    const double s0 = l * ds;
    const double s1 = (l + 1) * ds;
    const double sm = 0.5 * (s0 + s1);
    const double mu0 = damping_mu(cfg.chart, s0, cfg.toggles.damping);
    const double mu1 = damping_mu(cfg.chart, s1, cfg.toggles.damping);
    const double mum = damping_mu(cfg.chart, sm, cfg.toggles.damping);

    const VectorField base = (mu1 / mu0) * heat_convolve(w, cfg.nu, ds);
    VectorField next = base;
    for (int p = 0; p < cfg.k_max; ++p) {
      VectorField mid = 0.5 * (w + next);
      mid.set_time_tag(sm);
      const VectorField F = assemble_rhs(mid, sm, step_cfg);
      VectorField candidate =
          base + (ds * mu1 / mum) * heat_convolve(F, cfg.nu, 0.5 * ds);
      result.total_fp_sweeps += 1;
      const double delta = (candidate - next).max_abs();
      next = std::move(candidate);
      if (delta <= cfg.fp_tol * std::max(1.0, data_scale)) break;
    }
    next.set_time_tag(s1);
    check_divergence(next, data_scale, l + 1, -1);
    w = std::move(next);
    record(s1, w, l + 1);
  }
  return result;
}

double contraction_constant(double data_norm, int m, const KernelConstants& constants) {
  if (!(data_norm > 0.0))
    throw std::invalid_argument("contraction_constant: data norm must be positive");
  return 4.0 * std::pow(2.0, m) * data_norm * data_norm * constants.C_G *
         (1.0 + constants.C_Kn);
}

NonvanishReport nonvanish_criterion(double rho, double mu, double h0) {
  if (!(rho > 0.0) || !(mu > 0.0) || !(mu < 1.0))
    throw std::domain_error("nonvanish_criterion: need rho > 0 and mu in (0, 1)");
  NonvanishReport rep;
  rep.r = std::pow(rho, mu);
  if (!(rep.r < 1.0))
    throw std::domain_error("nonvanish_criterion: rho^mu must be below 1");
  rep.lhs = rep.r * (1.0 + rep.r / (1.0 - rep.r));
  rep.bound = 0.5 * h0;
  rep.pass = rep.lhs <= rep.bound;
  const double r_star = rep.bound / (1.0 + rep.bound);
  rep.max_passing_rho = std::pow(r_star, 1.0 / mu);
  return rep;
}

std::vector<double> residual_check(const std::vector<double>& s_slices,
                                   const std::vector<VectorField>& w,
                                   const SchemeConfig& cfg,
                                   const std::vector<VectorField>* forcing,
                                   bool include_viscosity) {
  const std::size_t L = s_slices.size();
  if (w.size() != L || L < 3)
    throw std::invalid_argument("residual_check: need >= 3 matching slices");
  if (forcing && forcing->size() != L)
    throw std::invalid_argument("residual_check: forcing/slice count mismatch");

  std::vector<double> out;
  out.reserve(L - 2);
  for (std::size_t l = 1; l + 1 < L; ++l) {
    const double ds = 0.5 * (s_slices[l + 1] - s_slices[l - 1]);
    const double t = cfg.chart.t_of_s(s_slices[l]);
    const double lambda =
        cfg.toggles.damping ? cfg.chart.coeff(CoeffKind::Damping, t) : 0.0;
    const VectorField F = assemble_rhs(w[l], s_slices[l], cfg);
    double slice_sq = 0.0;
    for (int c = 0; c < 3; ++c) {
      ScalarField r = w[l + 1].comps[c] - w[l - 1].comps[c];
      const double inv2ds = 1.0 / (2.0 * ds);
      for (double& v : r.samples) v *= inv2ds;
      if (include_viscosity) {
        const ScalarField lap = spectral_laplacian(w[l].comps[c]);
        for (std::size_t q = 0; q < r.samples.size(); ++q)
          r.samples[q] -= cfg.nu * lap.samples[q];
      }
      for (std::size_t q = 0; q < r.samples.size(); ++q) {
        r.samples[q] += lambda * w[l].comps[c].samples[q] - F.comps[c].samples[q];
        if (forcing) r.samples[q] -= (*forcing)[l].comps[c].samples[q];
      }
      const double norm = r.l2_norm();
      slice_sq += norm * norm;
    }
    out.push_back(std::sqrt(slice_sq));
  }
  return out;
}

OriginalPicardResult original_nse_picard(const VectorField& h, double nu,
                                         double t_horizon, int steps, int k_max, int m,
                                         double fp_tol, bool nonlinear_terms) {
  if (!(nu > 0.0)) throw std::domain_error("original_nse_picard: nu must be positive");
  if (!(t_horizon > 0.0) || steps < 2 || k_max < 1)
    throw std::invalid_argument("original_nse_picard: bad horizon/steps/k_max");
  if (h.frame() != Frame::OriginalX)
    throw std::invalid_argument("original_nse_picard: data must be original-frame");

  const GridSpec& g = h.spec();
  const double dt = t_horizon / steps;
  const std::size_t L = static_cast<std::size_t>(steps) + 1;
  const double data_scale = h.max_abs();
  const int decay_l = m * (g.n + 1);

  std::vector<double> times(L);
  for (std::size_t l = 0; l < L; ++l) times[l] = l * dt;

  auto assemble = [&](const VectorField& v) {
    VectorField F(g, Frame::OriginalX, v.time_tag());
    if (!nonlinear_terms) return F;
    std::array<std::array<ScalarField, 3>, 3> deriv;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) deriv[j][i] = spectral_derivative(v.comps[i], j);
    ScalarField strain(g, Frame::OriginalX, v.time_tag());
    for (std::size_t q = 0; q < strain.samples.size(); ++q) {
      double contraction = 0.0;
      for (int j = 0; j < 3; ++j)
        for (int mm = 0; mm < 3; ++mm)
          contraction += deriv[j][mm].samples[q] * deriv[mm][j].samples[q];
      strain.samples[q] = contraction;
    }
    for (int i = 0; i < 3; ++i) {
      const ScalarField leray = riesz_convolve(strain, i);
      for (std::size_t q = 0; q < F.comps[i].samples.size(); ++q) {
        double burgers = 0.0;
        for (int j = 0; j < 3; ++j)
          burgers += v.comps[j].samples[q] * deriv[j][i].samples[q];
        F.comps[i].samples[q] = -burgers + leray.samples[q];
      }
    }
    return F;
  };

  OriginalPicardResult result;
  result.times = times;

  std::vector<VectorField> v;
  v.reserve(L);
  for (std::size_t l = 0; l < L; ++l) {
    VectorField v0 = (times[l] > 0.0) ? heat_convolve(h, nu, times[l]) : h;
    v0.set_time_tag(times[l]);
    v.push_back(std::move(v0));
  }

  const auto xi2 = xi2_table(g);
  const std::size_t nk = xi2.size();

  for (int k = 1; k <= k_max; ++k) {
    std::vector<std::array<spectral::Spectrum, 3>> fhat(L);
    for (std::size_t l = 0; l < L; ++l) {
      const VectorField F = assemble(v[l]);
      for (int c = 0; c < 3; ++c) fhat[l][c] = spectral::forward(F.comps[c]);
    }
    std::vector<std::vector<double>> decay(L);
    for (std::size_t d = 1; d < L; ++d) {
      decay[d].resize(nk);
      const double tau = (static_cast<double>(d) - 0.5) * dt;
      for (std::size_t q = 0; q < nk; ++q) decay[d][q] = std::exp(-nu * tau * xi2[q]);
    }

    double inc_hm = 0.0, inc_cm = 0.0;
    std::vector<DecayReport> sweep_decay;
    std::vector<VectorField> v_next;
    v_next.reserve(L);
    for (std::size_t l = 0; l < L; ++l) {
      VectorField wl = (times[l] > 0.0) ? heat_convolve(h, nu, times[l]) : h;
      wl.set_time_tag(times[l]);
      if (l > 0) {
        std::array<spectral::Spectrum, 3> acc;
        for (int c = 0; c < 3; ++c) {
          acc[c] = fhat[0][c];
          std::fill(acc[c].data.begin(), acc[c].data.end(),
                    std::complex<double>(0.0));
        }
        for (std::size_t j = 0; j + 1 <= l; ++j) {
          const auto& dec = decay[l - j];
          for (int c = 0; c < 3; ++c) {
            const auto& a = fhat[j][c].data;
            const auto& b = fhat[j + 1][c].data;
            auto& dst = acc[c].data;
            for (std::size_t q = 0; q < nk; ++q)
              dst[q] += (0.5 * dt * dec[q]) * (a[q] + b[q]);
          }
        }
        for (int c = 0; c < 3; ++c) {
          const ScalarField add = spectral::inverse(acc[c]);
          for (std::size_t q = 0; q < add.samples.size(); ++q)
            wl.comps[c].samples[q] += add.samples[q];
        }
      }
      if (!wl.all_finite() || wl.max_abs() > kDivergenceFactor * data_scale)
        throw DivergedError(
            "original-coordinates scheme diverged; reduce t_horizon",
            static_cast<int>(l), k);
      VectorField delta = wl - v[l];
      const NormReport r = sobolev_cm_norm(delta, m);
      inc_hm = std::max(inc_hm, r.sobolev);
      inc_cm = std::max(inc_cm, r.sup_cm);
      if (l > 0) sweep_decay.push_back(decay_class_check(delta, decay_l, m));
      v_next.push_back(std::move(wl));
    }

    SweepRecord rec;
    rec.k = k;
    rec.increment_hm = inc_hm;
    rec.increment_cm = inc_cm;
    rec.increment = std::max(inc_hm, inc_cm);
    if (!result.increments.empty() && result.increments.back().increment > 0.0)
      rec.ratio = rec.increment / result.increments.back().increment;
    result.increments.push_back(rec);
    result.increment_decay.push_back(std::move(sweep_decay));
    v = std::move(v_next);
    if (rec.increment <= fp_tol * std::max(1.0, data_scale)) {
      result.converged = true;
      break;
    }
  }

  for (std::size_t l = 1; l < L; ++l)
    result.solution_decay.push_back(decay_class_check(v[l], decay_l - 1, m));
  result.v = std::move(v);
  return result;
}

}  // namespace conelab
