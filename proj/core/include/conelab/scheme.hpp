#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "conelab/field.hpp"
#include "conelab/geometry.hpp"
#include "conelab/grid.hpp"
#include "conelab/kernels.hpp"
#include "conelab/norms.hpp"

namespace conelab {

/// Which printed form of the artificial convection coefficient to use. The
/// two candidates differ by one factor of (rho - t); the transform audit
/// resolves which one the chain rule produces.
enum class ConvectionVariant { PrintedA, PrintedB };

struct TermToggles {
  bool burgers = true;
  bool convection = true;
  bool damping = true;
  bool leray = true;
};

struct SchemeConfig {
  ConeChart chart;
  GridSpec grid;  // cylinder frame
  double nu = 1e-2;
  int m = 2;
  double ds = 0.05;
  double s_max = 0.0;  // 0 resolves to the default horizon
  int k_max = 6;
  double fp_tol = 1e-9;
  TermToggles toggles;
  ConvectionVariant convection_variant = ConvectionVariant::PrintedA;
  double kernel_mu = 0.75;

  SchemeConfig(const ConeChart& c, const GridSpec& g) : chart(c), grid(g) {}

  /// s with t(s) = rho (1 - 1e-3): the default simulation horizon.
  static double default_s_max(const ConeChart& chart);
  double resolved_s_max() const { return s_max > 0.0 ? s_max : default_s_max(chart); }
  void validate() const;
};

/// Scheme blow-up (as opposed to blow-up of the reconstructed v): a slice
/// exceeded 10^6 x data norm or went non-finite.
class DivergedError : public std::runtime_error {
 public:
  DivergedError(const std::string& what, int slice, int sweep)
      : std::runtime_error(what), slice_(slice), sweep_(sweep) {}
  int slice() const { return slice_; }
  int sweep() const { return sweep_; }

 private:
  int slice_;
  int sweep_;
};

struct SweepRecord {
  int k = 0;
  double increment_hm = 0.0;   // sup over slices of |delta w|_{H^m}
  double increment_cm = 0.0;   // sup over slices of |delta w|_{C^m}
  double increment = 0.0;      // sup over slices of the combined norm
  double ratio = 0.0;          // vs the previous sweep (0 for k = 1)
};

/// Whole-interval Picard state. increments[0] corresponds to
/// delta w^(1) = w^(1) - h^rho * G_nu.
struct IterationState {
  int k = 0;
  std::vector<double> s_slices;
  std::vector<VectorField> w;
  std::vector<SweepRecord> increments;
  bool converged = false;
};

/// Per-slice assembly of the non-damping terms: Burgers, artificial
/// convection, and the Leray convolution, with all coefficients evaluated at
/// t(s) and cone-frame derivatives read through the cylinder metadata.
VectorField assemble_rhs(const VectorField& w_slice, double s, const SchemeConfig& cfg);

/// The Duhamel contribution: midpoint time quadrature of the heat-propagated
/// slice assemblies, with the damping integrating factor folded into the
/// propagation weights.
std::vector<VectorField> duhamel_rhs(const std::vector<VectorField>& w_prev,
                                     const std::vector<double>& s_slices,
                                     const SchemeConfig& cfg);

/// Starts the iteration at w^(0) = heat-flowed data on slices covering
/// [0, s_range].
IterationState init_whole_interval(const VectorField& data, const SchemeConfig& cfg,
                                   double s_range);

/// One sweep w^(k-1) -> w^(k); records the increment norms.
void picard_sweep(IterationState& state, const VectorField& data,
                  const SchemeConfig& cfg);

/// Runs sweeps until the increment drops below fp_tol or k_max is reached.
IterationState run_whole_interval(const VectorField& data, const SchemeConfig& cfg,
                                  double s_range);

/// Time-marching realization of the same iteration (per-step fixed-point
/// sweeps); memory-light and used for full-horizon runs.
struct MarchResult {
  std::vector<double> s;
  std::vector<double> t;
  std::vector<std::array<double, 3>> center;  // w(s, 0) per component
  double sup_combined_norm = 0.0;             // over sampled slices
  std::vector<double> norm_samples_s;
  std::vector<double> norm_samples;           // combined norm at sampled slices
  std::vector<double> stored_s;
  std::vector<VectorField> stored_slices;
  int total_fp_sweeps = 0;
};

struct MarchOptions {
  int store_stride = 0;  // 0: store no slices
  int norm_stride = 8;   // combined-norm sampling stride
};

MarchResult time_march(const VectorField& data, const SchemeConfig& cfg,
                       const MarchOptions& opts = {});

/// c* = 4 * 2^m * C_hrho^2 * C_G * (1 + C_Kn).
double contraction_constant(double data_norm, int m, const KernelConstants& constants);

/// rho^mu (1 + rho^mu / (1 - rho^mu)) <= h0 / 2, with the maximal passing rho.
struct NonvanishReport {
  double r = 0.0;          // rho^mu
  double lhs = 0.0;        // r (1 + r / (1 - r)) = r / (1 - r)
  double bound = 0.0;      // h0 / 2
  double max_passing_rho = 0.0;
  bool pass = false;
};
NonvanishReport nonvanish_criterion(double rho, double mu, double h0 = 1.0);

/// Strong-form residual per interior slice: centered s-differences, spectral
/// space derivatives; reports the discrete L2 norm of the residual. An
/// external forcing trajectory is subtracted when given; include_viscosity
/// selects the nu Delta term (off for the forced Euler-form check).
std::vector<double> residual_check(const std::vector<double>& s_slices,
                                   const std::vector<VectorField>& w,
                                   const SchemeConfig& cfg,
                                   const std::vector<VectorField>* forcing = nullptr,
                                   bool include_viscosity = true);

/// Remark-1 style local-time Picard scheme for the untransformed equation in
/// original coordinates (Burgers + Leray, no forcing), with per-sweep decay
/// reports of the functional increments.
struct OriginalPicardResult {
  std::vector<double> times;
  std::vector<VectorField> v;  // final iterate
  std::vector<SweepRecord> increments;
  // increment_decay[k][step]: decay report of delta v^(k+1) at (m(n+1), m)
  std::vector<std::vector<DecayReport>> increment_decay;
  // solution decay of the final iterate at (m(n+1)-1, m), per step
  std::vector<DecayReport> solution_decay;
  bool converged = false;
};

OriginalPicardResult original_nse_picard(const VectorField& h, double nu,
                                         double t_horizon, int steps, int k_max, int m,
                                         double fp_tol = 1e-10,
                                         bool nonlinear_terms = true);

}  // namespace conelab
