#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "conelab/field.hpp"
#include "conelab/grid.hpp"

namespace conelab {

/// Fundamental solution of d/dt - nu Laplacian, evaluated radially.
struct HeatKernel {
  double nu = 1.0;
  int n = 3;

  HeatKernel(double viscosity, int dim);

  /// G_nu(tau, x) for |x| = r.
  double value(double tau, double r) const;
  /// |d/dx_i G_nu(tau, x)| for x_i component magnitude xi and |x| = r.
  double grad_component(double tau, double xi_abs, double r) const;
};

/// Convolution kernel K_{n,i}(x) = c x_i / |x|^n with c = 1 / (n alpha(n)),
/// alpha(n) the unit-ball volume, so that K_{n,i} = d/dx_i of the Laplace
/// fundamental solution and the kernel path matches the spectral projector.
struct RieszKernel {
  int n = 3;
  double c = 0.0;

  explicit RieszKernel(int dim);

  double component(std::array<double, 3> x, int axis) const;
};

double unit_ball_volume(int n);
double riesz_constant(int n);

/// Bound constants of the kernel estimates.
///   C     = pi^{-n/2} sup_{z>0} z^{n-2 mu} e^{-z^2}
///   C'    = pi^{-n/2} sup_{z>0} z^{n+1-2 mu} e^{-z^2}
///   C_Kn  = |K_{,i}|_{L1(B_1)} + |K_{,i}|_{L2(R^n \ B_1)}
///   M2    = one-coordinate second moment of the unit-variance Gaussian
///   C_G   = max{C, C'}
struct KernelConstants {
  int n = 3;
  double mu = 0.75;
  double C = 0.0;
  double Cprime = 0.0;
  double C_Kn = 0.0;
  double M2 = 0.0;
  double C_G = 0.0;
  double argmax_z = 0.0;        // maximizer of z^{n-2mu} e^{-z^2}
  double argmax_z_prime = 0.0;  // maximizer of z^{n+1-2mu} e^{-z^2}
};

/// Computes the constants; C and C' by 1-D maximization, C_Kn by
/// radial-angular product quadrature (radial_nodes per piece), M2 by moment
/// quadrature. mu must lie in (0, 1).
KernelConstants kernel_constants(int n, double mu, int radial_nodes = 10000);

/// Pointwise envelopes of the heat kernel and its gradient.
double gaussian_envelope(const KernelConstants& k, double nu, double tau, double r);
double gaussian_grad_envelope(const KernelConstants& k, double nu, double tau, double r);

// -- convolution engines -----------------------------------------------------

/// Spatial convolution with the Gaussian at elapsed time tau, computed
/// spectrally on the periodically extended grid. Mass preserving. Flags
/// kWarnKernelUnderResolved when sqrt(2 nu tau) is below the grid spacing.
ScalarField heat_convolve(const ScalarField& f, double nu, double tau);
VectorField heat_convolve(const VectorField& f, double nu, double tau);

/// Convolution with d/dx_axis G_nu; equals the spatial derivative of
/// heat_convolve.
ScalarField heat_convolve_grad(const ScalarField& f, double nu, double tau, int axis);

/// Spectral derivative d/dx_axis (Nyquist mode zeroed).
ScalarField spectral_derivative(const ScalarField& f, int axis);

/// Spectral Laplacian.
ScalarField spectral_laplacian(const ScalarField& f);

/// Leray projection: symbol I - xi xi^T / |xi|^2, zero mode unchanged.
/// Output is discretely divergence-free.
VectorField leray_project(const VectorField& v);

/// Fast path of the Riesz convolution K_{n,i} * f: spectral multiplier
/// -i xi_i / |xi|^2 applied to the tapered source. Sources that have not
/// decayed at the grid boundary are flagged kWarnAliasingRisk.
ScalarField riesz_convolve(const ScalarField& f, int axis);

/// Reference path: direct truncated-kernel quadrature over the grid box,
/// evaluated at the given node indices. Near-singular cells are subdivided;
/// the self cell drops out by oddness.
std::vector<double> riesz_convolve_direct(const ScalarField& f, int axis,
                                          const std::vector<std::array<int, 3>>& nodes);

/// 4 L M2, the moment bound on |F * G_{nu,i}| for L-Lipschitz F.
double lipschitz_moment_bound(double L, const KernelConstants& k);

/// Measured sup_axis max_x |F * G_{nu,i}(tau)| for the bound check.
double lipschitz_convolution_sup(const ScalarField& F, double nu, double tau);

}  // namespace conelab
