#include "conelab/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "conelab/fft.hpp"
#include "conelab/numerics.hpp"

namespace conelab {

namespace {

constexpr double kPi = std::numbers::pi;

/// Mean |f| on the outermost node shell relative to the interior peak.
bool boundary_decayed(const ScalarField& f, double rel_tol = 1e-6) {
  const int N = f.spec.points_per_axis;
  const double peak = f.max_abs();
  if (peak == 0.0) return true;
  double edge_max = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      edge_max = std::max({edge_max, std::abs(f.at(0, i, j)), std::abs(f.at(i, 0, j)),
                           std::abs(f.at(i, j, 0))});
    }
  return edge_max <= rel_tol * peak;
}

}  // namespace

HeatKernel::HeatKernel(double viscosity, int dim) : nu(viscosity), n(dim) {
  if (!(nu > 0.0)) throw std::domain_error("HeatKernel: nu must be positive");
  if (n < 1) throw std::domain_error("HeatKernel: bad dimension");
}

double HeatKernel::value(double tau, double r) const {
  if (!(tau > 0.0)) throw std::domain_error("HeatKernel::value: tau must be positive");
  const double denom = std::pow(4.0 * kPi * nu * tau, 0.5 * n);
  return std::exp(-r * r / (4.0 * nu * tau)) / denom;
}

double HeatKernel::grad_component(double tau, double xi_abs, double r) const {
  return xi_abs / (2.0 * nu * tau) * value(tau, r);
}

double unit_ball_volume(int n) {
  return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double riesz_constant(int n) { return 1.0 / (n * unit_ball_volume(n)); }

RieszKernel::RieszKernel(int dim) : n(dim), c(riesz_constant(dim)) {
  if (n < 3) throw std::domain_error("RieszKernel: requires n >= 3");
}

double RieszKernel::component(std::array<double, 3> x, int axis) const {
  const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  if (r2 == 0.0) return 0.0;  // principal value, odd kernel
  return c * x[axis] / std::pow(r2, 0.5 * n);
}

KernelConstants kernel_constants(int n, double mu, int radial_nodes) {
  if (n < 3) throw std::domain_error("kernel_constants: n >= 3 required");
  if (!(mu > 0.0) || !(mu < 1.0))
    throw std::domain_error("kernel_constants: mu must lie in (0, 1)");

  KernelConstants k;
  k.n = n;
  k.mu = mu;

  const double pref = std::pow(kPi, -0.5 * n);
  auto profile = [](double z, double p) { return std::pow(z, p) * std::exp(-z * z); };

  const double p0 = n - 2.0 * mu;
  auto [z0, f0] = maximize_scan_golden([&](double z) { return profile(z, p0); }, 1e-8,
                                       6.0, 4096);
  k.argmax_z = z0;
  k.C = pref * f0;

  const double p1 = n + 1.0 - 2.0 * mu;
  auto [z1, f1] = maximize_scan_golden([&](double z) { return profile(z, p1); }, 1e-8,
                                       6.0, 4096);
  k.argmax_z_prime = z1;
  k.Cprime = pref * f1;
  k.C_G = std::max(k.C, k.Cprime);

  // C_Kn by radial-angular product rule. The angular factors reduce to 1-D
  // integrals over u = cos(theta) against the S^{n-1} slice weight.
  const double area_sn2 =
      2.0 * std::pow(kPi, 0.5 * (n - 1)) / std::tgamma(0.5 * (n - 1));
  const double slice_pow = 0.5 * (n - 3.0);
  auto angular = [&](const std::function<double(double)>& g) {
    return area_sn2 * integrate_gauss([&](double u) {
             return g(u) * std::pow(std::max(1.0 - u * u, 0.0), slice_pow);
           },
                                      -1.0, 1.0, std::max(radial_nodes / 64, 32));
  };
  const double ang_abs = angular([](double u) { return std::abs(u); });
  const double ang_sq = angular([](double u) { return u * u; });

  const double c = riesz_constant(n);
  // |K_i|(r, omega) = c |omega_i| r^{-(n-1)}; the B_1 radial integrand is
  // r^{n-1} r^{-(n-1)} = 1.
  const double radial_inner =
      integrate_gauss([](double) { return 1.0; }, 0.0, 1.0, radial_nodes / 16);
  const double l1_b1 = c * radial_inner * ang_abs;
  // Exterior L2: substitute u = 1/r so the improper radial integral
  // int_1^inf r^{-(n-1)} dr becomes int_0^1 u^{n-3} du.
  const double radial_outer = integrate_gauss(
      [n](double u) { return std::pow(u, static_cast<double>(n - 3)); }, 0.0, 1.0,
      radial_nodes / 16);
  const double l2_sq = c * c * radial_outer * ang_sq;
  k.C_Kn = l1_b1 + std::sqrt(l2_sq);

  // One-coordinate second moment of the unit-variance normalized Gaussian.
  k.M2 = integrate_gauss(
      [](double y) {
        return y * y * std::exp(-0.5 * y * y) / std::sqrt(2.0 * kPi);
      },
      -12.0, 12.0, 256);

  return k;
}

double gaussian_envelope(const KernelConstants& k, double nu, double tau, double r) {
  return k.C / (std::pow(nu * tau, 0.5 * k.mu) * std::pow(r, k.n - 2.0 * k.mu));
}

double gaussian_grad_envelope(const KernelConstants& k, double nu, double tau, double r) {
  return k.Cprime /
         (std::pow(nu * tau, 0.5 * k.mu) * std::pow(r, k.n + 1.0 - 2.0 * k.mu));
}

ScalarField heat_convolve(const ScalarField& f, double nu, double tau) {
  if (!(tau > 0.0)) throw std::domain_error("heat_convolve: tau must be positive");
  if (!(nu > 0.0)) throw std::domain_error("heat_convolve: nu must be positive");
  auto s = spectral::forward(f);
  const auto xi = spectral::wavenumbers(f.spec);
  const int N = f.spec.points_per_axis;
  const int nk = N / 2 + 1;
  std::size_t idx = 0;
  for (int i = 0; i < N; ++i) {
    const double xi2_i = xi[i] * xi[i];
    for (int j = 0; j < N; ++j) {
      const double xi2_ij = xi2_i + xi[j] * xi[j];
      for (int k = 0; k < nk; ++k, ++idx) {
        const double xi2 = xi2_ij + xi[k] * xi[k];
        s.data[idx] *= std::exp(-nu * tau * xi2);
      }
    }
  }
  ScalarField out = spectral::inverse(s);
  if (std::sqrt(2.0 * nu * tau) < f.spec.spacing())
    out.warnings |= kWarnKernelUnderResolved;
  return out;
}

VectorField heat_convolve(const VectorField& f, double nu, double tau) {
  VectorField out = f;
  for (auto& c : out.comps) c = heat_convolve(c, nu, tau);
  return out;
}

ScalarField heat_convolve_grad(const ScalarField& f, double nu, double tau, int axis) {
  if (!(tau > 0.0)) throw std::domain_error("heat_convolve_grad: tau must be positive");
  auto s = spectral::forward(f);
  const auto xi = spectral::wavenumbers(f.spec);
  const int N = f.spec.points_per_axis;
  const int nk = N / 2 + 1;
  std::size_t idx = 0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < nk; ++k, ++idx) {
        const int ax_idx = (axis == 0) ? i : (axis == 1) ? j : k;
        const double xi2 = xi[i] * xi[i] + xi[j] * xi[j] + xi[k] * xi[k];
        if (spectral::is_nyquist(ax_idx, N)) {
          s.data[idx] = 0.0;
          continue;
        }
        const std::complex<double> mult(0.0, xi[ax_idx]);
        s.data[idx] *= mult * std::exp(-nu * tau * xi2);
      }
  ScalarField out = spectral::inverse(s);
  if (std::sqrt(2.0 * nu * tau) < f.spec.spacing())
    out.warnings |= kWarnKernelUnderResolved;
  return out;
}

ScalarField spectral_derivative(const ScalarField& f, int axis) {
  auto s = spectral::forward(f);
  const auto xi = spectral::wavenumbers(f.spec);
  const int N = f.spec.points_per_axis;
  const int nk = N / 2 + 1;
  std::size_t idx = 0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < nk; ++k, ++idx) {
        const int ax_idx = (axis == 0) ? i : (axis == 1) ? j : k;
        if (spectral::is_nyquist(ax_idx, N)) {
          s.data[idx] = 0.0;
          continue;
        }
        s.data[idx] *= std::complex<double>(0.0, xi[ax_idx]);
      }
  return spectral::inverse(s);
}

ScalarField spectral_laplacian(const ScalarField& f) {
  auto s = spectral::forward(f);
  const auto xi = spectral::wavenumbers(f.spec);
  const int N = f.spec.points_per_axis;
  const int nk = N / 2 + 1;
  std::size_t idx = 0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < nk; ++k, ++idx) {
        const double xi2 = xi[i] * xi[i] + xi[j] * xi[j] + xi[k] * xi[k];
        s.data[idx] *= -xi2;
      }
  return spectral::inverse(s);
}

VectorField leray_project(const VectorField& v) {
  if (v.components() != 3) throw std::invalid_argument("leray_project: need 3 components");
  std::array<spectral::Spectrum, 3> s = {spectral::forward(v.comps[0]),
                                         spectral::forward(v.comps[1]),
                                         spectral::forward(v.comps[2])};
  const auto xi = spectral::wavenumbers(v.spec());
  const int N = v.spec().points_per_axis;
  const int nk = N / 2 + 1;
  std::size_t idx = 0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < nk; ++k, ++idx) {
        const double kx = xi[i], ky = xi[j], kz = xi[k];
        const double k2 = kx * kx + ky * ky + kz * kz;
        if (k2 == 0.0) continue;  // zero mode left unchanged
        const std::complex<double> dot =
            kx * s[0].data[idx] + ky * s[1].data[idx] + kz * s[2].data[idx];
        s[0].data[idx] -= kx * dot / k2;
        s[1].data[idx] -= ky * dot / k2;
        s[2].data[idx] -= kz * dot / k2;
      }
  VectorField out = v;
  for (int c = 0; c < 3; ++c) out.comps[c] = spectral::inverse(s[c]);
  return out;
}

ScalarField riesz_convolve(const ScalarField& f, int axis) {
  const bool decayed = boundary_decayed(f);
  ScalarField src = apply_taper(f);
  auto s = spectral::forward(src);
  const auto xi = spectral::wavenumbers(f.spec);
  const int N = f.spec.points_per_axis;
  const int nk = N / 2 + 1;
  std::size_t idx = 0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < nk; ++k, ++idx) {
        const int ax_idx = (axis == 0) ? i : (axis == 1) ? j : k;
        const double k2 = xi[i] * xi[i] + xi[j] * xi[j] + xi[k] * xi[k];
        if (k2 == 0.0 || spectral::is_nyquist(ax_idx, N)) {
          s.data[idx] = 0.0;
          continue;
        }
        s.data[idx] *= std::complex<double>(0.0, -xi[ax_idx] / k2);
      }
  ScalarField out = spectral::inverse(s);
  if (!decayed) out.warnings |= kWarnAliasingRisk;
  return out;
}

std::vector<double> riesz_convolve_direct(const ScalarField& f, int axis,
                                          const std::vector<std::array<int, 3>>& nodes) {
  const RieszKernel kernel(f.spec.n);
  const int N = f.spec.points_per_axis;
  const double dx = f.spec.spacing();
  const double cell = f.spec.cell_volume();
  const auto xs = f.spec.axis_coords();
  // Taper as in the fast path so both paths integrate the same source.
  const ScalarField src = apply_taper(f);

  // Central-difference gradient of the source for the near-field sub-rule.
  std::array<ScalarField, 3> grad;
  for (int a = 0; a < 3; ++a) grad[a] = ScalarField(src.spec, src.frame, src.time_tag);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        auto cd = [&](int a, int b, int c, int a2, int b2, int c2) {
          return (src.at(std::min(a, N - 1), std::min(b, N - 1), std::min(c, N - 1)) -
                  src.at(std::max(a2, 0), std::max(b2, 0), std::max(c2, 0))) /
                 (2.0 * dx);
        };
        grad[0].at(i, j, k) = cd(i + 1, j, k, i - 1, j, k);
        grad[1].at(i, j, k) = cd(i, j + 1, k, i, j - 1, k);
        grad[2].at(i, j, k) = cd(i, j, k + 1, i, j, k - 1);
      }

  // Near-singular cells (within 3 cells of the target) use a 5^3 sub-rule on
  // the kernel with the source linearized about the node; farther cells use
  // the midpoint rule. The self cell's even part drops out by oddness but its
  // gradient moment int_cell K_i u_i du does not; it is added via the cell
  // moment I = int_cell u_i^2 / |u|^n du (axis-independent by cube symmetry).
  constexpr int kNear = 3;
  constexpr int kSub = 5;
  std::array<double, kSub> offsets;
  for (int a = 0; a < kSub; ++a) offsets[a] = ((a + 0.5) / kSub - 0.5) * dx;
  const double subvol = cell / (kSub * kSub * kSub);

  double self_moment = 0.0;
  {
    constexpr int m = 40;  // even count: no sub-point lands on the singularity
    const double sv = cell / (m * m * m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c) {
          const double u0 = ((a + 0.5) / m - 0.5) * dx;
          const double u1 = ((b + 0.5) / m - 0.5) * dx;
          const double u2 = ((c + 0.5) / m - 0.5) * dx;
          const double r2 = u0 * u0 + u1 * u1 + u2 * u2;
          self_moment += u0 * u0 / std::pow(r2, 0.5 * f.spec.n) * sv;
        }
    self_moment *= kernel.c;
  }

  std::vector<double> out;
  out.reserve(nodes.size());
  for (const auto& node : nodes) {
    const double px = xs[node[0]], py = xs[node[1]], pz = xs[node[2]];
    double acc = 0.0;
    std::size_t idx = 0;
    for (int i = 0; i < N; ++i) {
      const double ri = px - xs[i];
      for (int j = 0; j < N; ++j) {
        const double rj = py - xs[j];
        for (int k = 0; k < N; ++k, ++idx) {
          const double rk = pz - xs[k];
          const double fv = src.samples[idx];
          const int di = std::abs(node[0] - i), dj = std::abs(node[1] - j),
                    dk = std::abs(node[2] - k);
          const bool near = di <= kNear && dj <= kNear && dk <= kNear;
          if (!near) {
            if (fv != 0.0) acc += fv * kernel.component({ri, rj, rk}, axis) * cell;
            continue;
          }
          if (di == 0 && dj == 0 && dk == 0) {
            // Note the sign: the convolution integrand is K(x - y) f(y), so
            // the linear term contributes -grad f . u against K(u).
            acc -= grad[axis].samples[idx] * self_moment;
            continue;
          }
          const double gx = grad[0].samples[idx], gy = grad[1].samples[idx],
                       gz = grad[2].samples[idx];
          double sub = 0.0;
          for (int a = 0; a < kSub; ++a)
            for (int b = 0; b < kSub; ++b)
              for (int c = 0; c < kSub; ++c) {
                const double kv = kernel.component(
                    {ri - offsets[a], rj - offsets[b], rk - offsets[c]}, axis);
                sub += kv * (fv + gx * offsets[a] + gy * offsets[b] + gz * offsets[c]);
              }
          acc += sub * subvol;
        }
      }
    }
    out.push_back(acc);
  }
  return out;
}

double lipschitz_moment_bound(double L, const KernelConstants& k) {
  if (L < 0.0) throw std::domain_error("lipschitz_moment_bound: L must be nonnegative");
  return 4.0 * L * k.M2;
}

double lipschitz_convolution_sup(const ScalarField& F, double nu, double tau) {
  double sup = 0.0;
  for (int axis = 0; axis < 3; ++axis)
    sup = std::max(sup, heat_convolve_grad(F, nu, tau, axis).max_abs());
  return sup;
}

}  // namespace conelab
