#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "conelab/geometry.hpp"
#include "conelab/scheme.hpp"

namespace conelab {

/// Chain-rule audit of the transformed-equation coefficients. Forward-mode
/// duals differentiate the composite map v(t,x) = w(s(t), y(t,x)) / (rho - t)
/// for analytic test functions w, isolating each term; the measured factors
/// are compared against the implemented coefficient table.
struct TransformAuditReport {
  struct Term {
    std::string name;
    double max_rel_mismatch = 0.0;
    bool match = false;
  };

  int samples = 0;
  double tol = 0.0;
  std::vector<Term> terms;  // time, burgers, damping, leray

  double convection_a_mismatch = 0.0;  // vs (rho-t) sqrt(rho^2-t^2)^3 / rho^2
  double convection_b_mismatch = 0.0;  // vs sqrt(rho^2-t^2)^3 / rho^2
  ConvectionVariant resolved = ConvectionVariant::PrintedB;
  /// True when exactly one variant matched at every sample.
  bool resolution_deterministic = false;

  bool all_match() const;
};

TransformAuditReport transform_audit(const ConeChart& chart, int samples,
                                     std::uint64_t seed, double tol = 1e-10);

}  // namespace conelab
