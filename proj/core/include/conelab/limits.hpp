#pragma once

#include <vector>

#include "conelab/field.hpp"
#include "conelab/geometry.hpp"
#include "conelab/scheme.hpp"

namespace conelab {

struct SweepMember {
  double nu = 0.0;
  std::vector<double> s;
  std::vector<double> t;
  std::vector<double> center;  // w(s, 0), first component
  double sup_norm = 0.0;       // sup over sampled slices of the combined norm
};

struct SweepResult {
  std::vector<double> nus;  // strictly decreasing
  std::vector<SweepMember> members;
  std::vector<double> extrapolated;        // nu -> 0 center series
  std::vector<double> extrapolation_error;  // per-sample |extrapolated - smallest nu|
  double fitted_order = 0.0;               // observed convergence order in nu
  bool extrapolation_valid = false;        // false: declined, raw series returned
};

/// Runs the scheme once per viscosity (members run concurrently) and
/// Richardson-extrapolates the center series to nu = 0 with the order fitted
/// from the three smallest viscosities.
SweepResult viscosity_sweep(const SchemeConfig& base, const VectorField& data,
                            const std::vector<double>& nus,
                            const MarchOptions& opts = {});

struct CenterSeries {
  std::vector<double> t;
  std::vector<double> v;  // v(t, 0) = w(s(t), 0) / (rho - t)
};

CenterSeries reconstruct_center_series(const std::vector<double>& s,
                                       const std::vector<double>& w_center,
                                       const ConeChart& chart);

struct BlowupReport {
  double fitted_order = 0.0;      // slope of log |v| against -log(rho - t)
  double fitted_order_ci = 0.0;   // least-squares slope standard error
  double bounded_product = 0.0;   // sup_t |v(t,0)| (rho - t)
  double tail_limit_estimate = 0.0;  // w(s,0) as s -> inf, drift-removed
  double tail_uncertainty = 0.0;
  bool sign_change_flag = false;  // fit ran on |v| across a sign change
};

/// Fits the blow-up order over the final two decades of (rho - t) and
/// estimates the tip value of w by final-decade averaging with linear drift
/// removal. Requires the series to span at least two decades.
BlowupReport blowup_fit(const CenterSeries& series, const ConeChart& chart);

struct ForcingReport {
  std::vector<double> s;
  std::vector<double> t;
  std::vector<double> fw_slice_l2;    // per-slice L2 (grid measure) of f^w
  std::vector<double> fv_slice_l2sq;  // per-slice int |f^v|^2 dx (exact measure)
  std::vector<double> eps_ladder;
  std::vector<double> fv_l2;  // sqrt of the [0, rho-eps] x space integral, per eps
  std::vector<VectorField> f_w;  // populated when keep_fields
  std::vector<VectorField> f_v;
};

/// f^w = -nu Laplacian w per slice (the scheme's grid Laplacian) and
/// f^v = -nu Laplacian v expressed through the stored w samples, with the
/// L2 report over the epsilon ladder in original coordinates. The original-
/// coordinates integral uses the exact measure dx = prod sec^2(z_i) dz.
ForcingReport synthesize_forcing(const std::vector<double>& s_slices,
                                 const std::vector<VectorField>& w, double nu,
                                 const ConeChart& chart,
                                 const std::vector<double>& eps_ladder,
                                 bool keep_fields = false);

}  // namespace conelab
