#include "conelab/norms.hpp"

#include <cmath>
#include <stdexcept>

#include "conelab/fft.hpp"

namespace conelab {

NormReport sobolev_cm_norm(const ScalarField& f, int m) {
  if (m < 0) throw std::domain_error("sobolev_cm_norm: m must be nonnegative");
  NormReport report;
  report.m = m;

  auto s = spectral::forward(f);
  if (spectral::high_mode_energy_fraction(s) > 1e-8)
    report.warnings |= kWarnUnderResolved;

  const auto xi = spectral::wavenumbers(f.spec);
  const int N = f.spec.points_per_axis;
  const int nk = N / 2 + 1;
  const std::size_t total = f.spec.size();

  // Parseval with the grid measure: |f|_{L2}^2 = (vol_cell / N^3) sum |fhat|^2.
  double sum = 0.0;
  std::size_t idx = 0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < nk; ++k, ++idx) {
        const double xi2 = xi[i] * xi[i] + xi[j] * xi[j] + xi[k] * xi[k];
        const double w = (k == 0 || k == N / 2) ? 1.0 : 2.0;
        sum += w * std::pow(1.0 + xi2, static_cast<double>(m)) * std::norm(s.data[idx]);
      }
  report.sobolev =
      std::sqrt(sum * f.spec.cell_volume() / static_cast<double>(total));

  double sup = 0.0;
  for (const auto& gamma : multi_indices_up_to(m)) {
    if (gamma[0] + gamma[1] + gamma[2] == 0) {
      sup = std::max(sup, f.max_abs());
      continue;
    }
    sup = std::max(sup, spectral_multi_derivative(f, gamma).max_abs());
  }
  report.sup_cm = sup;
  return report;
}

NormReport sobolev_cm_norm(const VectorField& f, int m) {
  NormReport report;
  report.m = m;
  for (const auto& c : f.comps) {
    const NormReport r = sobolev_cm_norm(c, m);
    report.sobolev = std::max(report.sobolev, r.sobolev);
    report.sup_cm = std::max(report.sup_cm, r.sup_cm);
    report.warnings |= r.warnings;
  }
  return report;
}

ScalarField spectral_multi_derivative(const ScalarField& f,
                                      const std::array<int, 3>& gamma) {
  auto s = spectral::forward(f);
  const auto xi = spectral::wavenumbers(f.spec);
  const int N = f.spec.points_per_axis;
  const int nk = N / 2 + 1;
  std::size_t idx = 0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < nk; ++k, ++idx) {
        const std::array<int, 3> ax = {i, j, k};
        std::complex<double> mult(1.0, 0.0);
        for (int d = 0; d < 3; ++d) {
          if (gamma[d] == 0) continue;
          // Odd powers at the Nyquist mode have no consistent sign; zero them.
          if (spectral::is_nyquist(ax[d], N) && (gamma[d] % 2 == 1)) {
            mult = 0.0;
            break;
          }
          std::complex<double> factor(0.0, xi[ax[d]]);
          for (int p = 0; p < gamma[d]; ++p) mult *= factor;
        }
        s.data[idx] *= mult;
      }
  return spectral::inverse(s);
}

std::vector<std::array<int, 3>> multi_indices_up_to(int m) {
  std::vector<std::array<int, 3>> out;
  for (int total = 0; total <= m; ++total)
    for (int a = total; a >= 0; --a)
      for (int b = total - a; b >= 0; --b) out.push_back({a, b, total - a - b});
  return out;
}

namespace {

DecayReport decay_check_impl(const std::vector<const ScalarField*>& comps, int l, int m) {
  const ScalarField& first = *comps.front();
  if (first.frame != Frame::OriginalX)
    throw std::domain_error("decay_class_check: field must be in the original frame");
  const double h = first.spec.half_extent;
  if (!(h > 1.0))
    throw std::domain_error("decay_class_check: grid must extend beyond |x| = 1");

  DecayReport report;
  report.l = l;
  report.m = m;

  // Three nested annuli, geometric in radius, inside the inscribed ball.
  const double q = std::cbrt(h);
  const std::array<double, 4> radii = {1.0, q, q * q, h};

  const auto gammas = multi_indices_up_to(m);
  std::vector<double> constants(3, 0.0);
  for (const ScalarField* fc : comps) {
    for (const auto& gamma : gammas) {
      const ScalarField d = (gamma[0] + gamma[1] + gamma[2] == 0)
                                ? *fc
                                : spectral_multi_derivative(*fc, gamma);
      const int N = d.spec.points_per_axis;
      const auto xs = d.spec.axis_coords();
      std::size_t idx = 0;
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
          for (int k = 0; k < N; ++k, ++idx) {
            const double r =
                std::sqrt(xs[i] * xs[i] + xs[j] * xs[j] + xs[k] * xs[k]);
            if (r < radii[0] || r > radii[3]) continue;
            int w = (r < radii[1]) ? 0 : (r < radii[2]) ? 1 : 2;
            const double c =
                std::abs(d.samples[idx]) * (1.0 + std::pow(r, static_cast<double>(l)));
            if (c > constants[w]) constants[w] = c;
          }
    }
  }

  report.window_constants.assign(constants.begin(), constants.end());
  bool ok = true;
  for (const double c : constants)
    if (!std::isfinite(c)) ok = false;
  for (std::size_t w = 1; w < constants.size(); ++w) {
    if (constants[w - 1] == 0.0) continue;
    if (constants[w] >= 1.1 * constants[w - 1]) ok = false;
  }
  report.pass = ok;
  return report;
}

}  // namespace

DecayReport decay_class_check(const ScalarField& f, int l, int m) {
  return decay_check_impl({&f}, l, m);
}

DecayReport decay_class_check(const VectorField& f, int l, int m) {
  std::vector<const ScalarField*> ptrs;
  for (const auto& c : f.comps) ptrs.push_back(&c);
  return decay_check_impl(ptrs, l, m);
}

}  // namespace conelab
