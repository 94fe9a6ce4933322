#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "multiphonic/error.hpp"

namespace mph::detail {

namespace {
// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
  if (n < 2) throw Error(ErrorCode::Configuration, "FFT length must be at least 2");
  std::lock_guard lock(planner_mutex());
  real_ = fftw_alloc_real(n);
  auto* spec = fftw_alloc_complex(n / 2 + 1);
  spec_ = spec;
  if (real_ == nullptr || spec == nullptr) throw Error(ErrorCode::Internal, "FFT allocation failed");
  const int len = static_cast<int>(n);
  forward_plan_ = fftw_plan_dft_r2c_1d(len, real_, spec, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(len, spec, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_free(real_);
  fftw_free(spec_);
}

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) {
  const std::size_t m = std::min(in.size(), n_);
  std::copy_n(in.begin(), m, real_);
  std::fill(real_ + m, real_ + n_, 0.0);
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  const auto* spec = static_cast<const fftw_complex*>(spec_);
  const std::size_t k = std::min(out.size(), bins());
  for (std::size_t i = 0; i < k; ++i) out[i] = {spec[i][0], spec[i][1]};
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
  auto* spec = static_cast<fftw_complex*>(spec_);
  const std::size_t k = std::min(in.size(), bins());
  for (std::size_t i = 0; i < k; ++i) {
    spec[i][0] = in[i].real();
    spec[i][1] = in[i].imag();
  }
  for (std::size_t i = k; i < bins(); ++i) spec[i][0] = spec[i][1] = 0.0;
  fftw_execute(static_cast<fftw_plan>(inverse_plan_));
  std::copy_n(real_, std::min(out.size(), n_), out.begin());
}

}  // namespace mph::detail
