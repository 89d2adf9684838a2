#include "fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <new>

namespace normprop::detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
  real_ = fftw_alloc_real(n);
  auto* spec = fftw_alloc_complex(n / 2 + 1);
  if (real_ == nullptr || spec == nullptr) throw std::bad_alloc();
  spectrum_ = spec;
  std::lock_guard lock(planner_mutex());
  const int len = static_cast<int>(n);
  forward_plan_ = fftw_plan_dft_r2c_1d(len, real_, spec, FFTW_ESTIMATE);
  backward_plan_ = fftw_plan_dft_c2r_1d(len, spec, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
  }
  fftw_free(real_);
  fftw_free(spectrum_);
}

std::span<std::complex<double>> RealFft::spectrum() noexcept {
  // fftw_complex is layout-compatible with std::complex<double>.
  return {reinterpret_cast<std::complex<double>*>(spectrum_), spectrum_size()};
}

void RealFft::forward() { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }

// c2r destroys its input; callers treat spectrum() as scratch afterwards.
void RealFft::backward() { fftw_execute(static_cast<fftw_plan>(backward_plan_)); }

}  // namespace normprop::detail
