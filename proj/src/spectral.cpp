#include "gtrans/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "gtrans/error.hpp"
#include "gtrans/vec2.hpp"

namespace gtrans {
namespace {

// FFTW planning is not thread-safe; execution on fresh arrays is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

struct Workspace {
  explicit Workspace(int n_) : n(n_) {
    real = fftw_alloc_real(static_cast<size_t>(n));
    spec = fftw_alloc_complex(static_cast<size_t>(n / 2 + 1));
    std::lock_guard lock(plan_mutex());
    forward = fftw_plan_dft_r2c_1d(n, real, spec, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(n, spec, real, FFTW_ESTIMATE);
  }
  ~Workspace() {
    {
      std::lock_guard lock(plan_mutex());
      fftw_destroy_plan(forward);
      fftw_destroy_plan(backward);
    }
    fftw_free(real);
    fftw_free(spec);
  }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  int n;
  double* real;
  fftw_complex* spec;
  fftw_plan forward;
  fftw_plan backward;
};

Workspace& workspace(int n) {
  thread_local std::map<int, std::unique_ptr<Workspace>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Workspace>(n);
  return *slot;
}

void check_size(std::span<const double> f) {
  if (!is_power_of_two(static_cast<int>(f.size())) || f.size() < 4) {
    fail(ErrorKind::invalid_argument, "periodic grid size must be a power of two >= 4");
  }
}

// Multiplies the spectrum by (ik)^order, then transforms back into `out`.
void spectral_apply(Workspace& ws, const std::vector<std::complex<double>>& spec,
                    int order, std::span<double> out) {
  const int n = ws.n;
  const int half = n / 2;
  for (int k = 0; k <= half; ++k) {
    std::complex<double> c = spec[static_cast<size_t>(k)];
    if (order == 1) {
      c = (k == half) ? 0.0 : c * std::complex<double>(0.0, k);
    } else if (order == 2) {
      c *= -static_cast<double>(k) * k;
    }
    ws.spec[k][0] = c.real() / n;
    ws.spec[k][1] = c.imag() / n;
  }
  fftw_execute_dft_c2r(ws.backward, ws.spec, ws.real);
  for (int j = 0; j < n; ++j) out[static_cast<size_t>(j)] = ws.real[j];
}

std::vector<std::complex<double>> raw_spectrum(Workspace& ws, std::span<const double> f) {
  const int n = ws.n;
  for (int j = 0; j < n; ++j) ws.real[j] = f[static_cast<size_t>(j)];
  fftw_execute_dft_r2c(ws.forward, ws.real, ws.spec);
  std::vector<std::complex<double>> spec(static_cast<size_t>(n / 2 + 1));
  for (int k = 0; k <= n / 2; ++k) spec[static_cast<size_t>(k)] = {ws.spec[k][0], ws.spec[k][1]};
  return spec;
}

}  // namespace

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void periodic_derivatives(std::span<const double> f, std::span<double> d1,
                          std::span<double> d2, DiffRule rule) {
  check_size(f);
  const int n = static_cast<int>(f.size());
  if (rule == DiffRule::spectral) {
    auto& ws = workspace(n);
    const auto spec = raw_spectrum(ws, f);
    if (!d1.empty()) spectral_apply(ws, spec, 1, d1);
    if (!d2.empty()) spectral_apply(ws, spec, 2, d2);
    return;
  }
  const double dt = kTwoPi / n;
  const double c = std::cos(dt);
  for (int j = 0; j < n; ++j) {
    const double fm = f[static_cast<size_t>((j + n - 1) % n)];
    const double f0 = f[static_cast<size_t>(j)];
    const double fp = f[static_cast<size_t>((j + 1) % n)];
    if (!d1.empty()) d1[static_cast<size_t>(j)] = (fp - fm) / (2.0 * std::sin(dt));
    // f'' + f = (fm + fp - 2 cos(dt) f0) / (2 (1 - cos dt)) exactly for sinusoids
    if (!d2.empty()) d2[static_cast<size_t>(j)] = (fm + fp - 2.0 * c * f0) / (2.0 * (1.0 - c)) - f0;
  }
}

void radius_of_curvature(std::span<const double> f, std::span<double> out, DiffRule rule) {
  std::vector<double> d2(f.size());
  periodic_derivatives(f, {}, d2, rule);
  for (size_t j = 0; j < f.size(); ++j) out[j] = f[j] + d2[j];
}

std::vector<std::complex<double>> fourier_coefficients(std::span<const double> f) {
  check_size(f);
  const int n = static_cast<int>(f.size());
  auto spec = raw_spectrum(workspace(n), f);
  for (auto& c : spec) c /= static_cast<double>(n);
  return spec;
}

TrigValue eval_trig(std::span<const std::complex<double>> coeffs, int n, double theta) {
  const int half = n / 2;
  TrigValue out;
  out.f = coeffs[0].real();
  const std::complex<double> step(std::cos(theta), std::sin(theta));
  std::complex<double> e = step;
  for (int k = 1; k < half; ++k) {
    const std::complex<double> t = coeffs[static_cast<size_t>(k)] * e;
    out.f += 2.0 * t.real();
    out.df -= 2.0 * k * t.imag();
    out.d2f -= 2.0 * k * k * t.real();
    e *= step;
  }
  // Nyquist term carries a cosine only.
  const double cn = coeffs[static_cast<size_t>(half)].real() * std::cos(half * theta);
  out.f += cn;
  out.d2f -= static_cast<double>(half) * half * cn;
  return out;
}

std::vector<double> gaussian_smooth(std::span<const double> f, double sigma) {
  check_size(f);
  const int n = static_cast<int>(f.size());
  auto& ws = workspace(n);
  auto spec = raw_spectrum(ws, f);
  for (int k = 0; k <= n / 2; ++k) {
    spec[static_cast<size_t>(k)] *= std::exp(-0.5 * sigma * sigma * k * k);
  }
  std::vector<double> out(static_cast<size_t>(n));
  spectral_apply(ws, spec, 0, out);
  return out;
}

}  // namespace gtrans
