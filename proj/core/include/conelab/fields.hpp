#pragma once

#include "conelab/field.hpp"
#include "conelab/geometry.hpp"
#include "conelab/grid.hpp"

namespace conelab {

/// The construction's reference data: every component the radial Gaussian
/// h_i(x) = (1/rho) exp(-|x|^2 / a) with a = 1 / rho^3, plus its transform
/// h^rho on the cylinder grid, normalized so h^rho(0) = 1.
struct GaussianData {
  VectorField h;      // original_x frame
  VectorField h_rho;  // cylinder_z frame (z = atan(x)), time tag s = 0
  double a = 0.0;     // squared-width parameter of the x-space Gaussian
  double sigma = 0.0; // standard deviation sqrt(a / 2)
};

GaussianData make_gaussian_data(const ConeChart& chart, int points_original,
                                int points_cylinder, double amplitude = 1.0);

/// Mass of a cylinder-frame field outside the cone section it represents
/// (zero by construction for transformed data; kept as an audited quantity).
double mass_outside_cone_base(const ScalarField& h_rho, const ConeChart& chart);

/// v(t, x) = w(s, y(t, x)) / (rho - t) evaluated on the target x-grid by
/// monotone-cubic interpolation of the stored cylinder samples.
VectorField push_velocity(const VectorField& w, const ConeChart& chart,
                          const GridSpec& x_grid);

/// Inverse of push_velocity: w(s, z) = (rho - t) v(t, tan(z)) resampled on a
/// cylinder grid. Query points beyond the x-grid extent read as zero
/// (original-frame fields decay within their extent).
VectorField pull_velocity(const VectorField& v, const ConeChart& chart,
                          int points_cylinder);

/// The Laplacian of v expressed through the stored w samples:
/// sum_j cos^4(z_j) (w_,jj - 2 tan(z_j) w_,j) / (rho - t), per component.
VectorField laplacian_via_cone(const VectorField& w, const ConeChart& chart);

/// Spectral divergence.
ScalarField divergence(const VectorField& v);

/// Monotone cubic (limited-slope Hermite) interpolation of a scalar field at
/// one physical point; `clamp` continues edge values outward, otherwise
/// outside queries return zero.
double interp3_monotone(const ScalarField& f, double x0, double x1, double x2,
                        bool clamp);

/// Separable tensor-grid resampling with the same monotone cubic rule:
/// queries[a] lists the physical coordinates along axis a (one per target
/// node). Equivalent to interp3_monotone at every tensor point, evaluated in
/// three axis passes.
ScalarField resample_monotone(const ScalarField& src, const GridSpec& dst,
                              Frame dst_frame, double dst_tag,
                              const std::array<std::vector<double>, 3>& queries,
                              bool clamp);

}  // namespace conelab
