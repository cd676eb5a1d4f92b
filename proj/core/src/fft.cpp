#include "conelab/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace conelab::spectral {

namespace {

// FFTW plan creation is not thread-safe; execution on distinct buffers is.
// Plans are cached per grid size and reused through the new-array interface.
struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

std::map<int, PlanPair>& plan_cache() {
  static std::map<int, PlanPair> cache;
  return cache;
}

PlanPair plans_for(int N) {
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto& cache = plan_cache();
  auto it = cache.find(N);
  if (it != cache.end()) return it->second;

  const std::size_t real_count = static_cast<std::size_t>(N) * N * N;
  const std::size_t cplx_count = static_cast<std::size_t>(N) * N * (N / 2 + 1);
  double* rbuf = fftw_alloc_real(real_count);
  fftw_complex* cbuf = fftw_alloc_complex(cplx_count);
  PlanPair p;
  p.fwd = fftw_plan_dft_r2c_3d(N, N, N, rbuf, cbuf, FFTW_ESTIMATE);
  p.bwd = fftw_plan_dft_c2r_3d(N, N, N, cbuf, rbuf, FFTW_ESTIMATE);
  fftw_free(rbuf);
  fftw_free(cbuf);
  if (!p.fwd || !p.bwd) throw std::runtime_error("fftw plan creation failed");
  cache.emplace(N, p);
  return p;
}

struct FftwRealDeleter {
  void operator()(double* p) const { fftw_free(p); }
};
struct FftwComplexDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

}  // namespace

Spectrum forward(const ScalarField& f) {
  const int N = f.spec.points_per_axis;
  const PlanPair plans = plans_for(N);
  const std::size_t real_count = f.samples.size();
  const std::size_t cplx_count = static_cast<std::size_t>(N) * N * (N / 2 + 1);

  std::unique_ptr<double[], FftwRealDeleter> rbuf(fftw_alloc_real(real_count));
  std::unique_ptr<fftw_complex[], FftwComplexDeleter> cbuf(fftw_alloc_complex(cplx_count));
  std::copy(f.samples.begin(), f.samples.end(), rbuf.get());

  fftw_execute_dft_r2c(plans.fwd, rbuf.get(), cbuf.get());

  Spectrum s;
  s.spec = f.spec;
  s.frame = f.frame;
  s.time_tag = f.time_tag;
  s.warnings = f.warnings;
  s.data.resize(cplx_count);
  for (std::size_t i = 0; i < cplx_count; ++i)
    s.data[i] = {cbuf[i][0], cbuf[i][1]};
  return s;
}

ScalarField inverse(const Spectrum& s) {
  const int N = s.spec.points_per_axis;
  const PlanPair plans = plans_for(N);
  const std::size_t real_count = s.spec.size();
  const std::size_t cplx_count = s.nk();
  if (s.data.size() != cplx_count) throw std::invalid_argument("inverse: bad spectrum");

  std::unique_ptr<fftw_complex[], FftwComplexDeleter> cbuf(fftw_alloc_complex(cplx_count));
  std::unique_ptr<double[], FftwRealDeleter> rbuf(fftw_alloc_real(real_count));
  for (std::size_t i = 0; i < cplx_count; ++i) {
    cbuf[i][0] = s.data[i].real();
    cbuf[i][1] = s.data[i].imag();
  }

  fftw_execute_dft_c2r(plans.bwd, cbuf.get(), rbuf.get());

  ScalarField f(s.spec, s.frame, s.time_tag);
  f.warnings = s.warnings;
  const double scale = 1.0 / static_cast<double>(real_count);
  for (std::size_t i = 0; i < real_count; ++i) f.samples[i] = rbuf[i] * scale;
  return f;
}

std::vector<double> wavenumbers(const GridSpec& spec) {
  const int N = spec.points_per_axis;
  std::vector<double> xi(N);
  const double base = std::numbers::pi / spec.half_extent;
  for (int m = 0; m < N; ++m) {
    const int signed_m = (m <= N / 2) ? m : m - N;
    xi[m] = base * signed_m;
  }
  return xi;
}

double high_mode_energy_fraction(const Spectrum& s) {
  const int N = s.spec.points_per_axis;
  const int nk = N / 2 + 1;
  const auto xi = wavenumbers(s.spec);
  const double cutoff = (2.0 / 3.0) * std::abs(xi[N / 2]);
  double total = 0.0, high = 0.0;
  std::size_t idx = 0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < nk; ++k, ++idx) {
        const double e = std::norm(s.data[idx]);
        // Interior half-spectrum modes stand for a conjugate pair.
        const double w = (k == 0 || k == N / 2) ? 1.0 : 2.0;
        total += w * e;
        if (std::abs(xi[i]) >= cutoff || std::abs(xi[j]) >= cutoff ||
            std::abs(xi[k]) >= cutoff)
          high += w * e;
      }
  return total > 0.0 ? high / total : 0.0;
}

}  // namespace conelab::spectral
