#ifndef NORMPROP_SRC_FFT_HPP_
#define NORMPROP_SRC_FFT_HPP_

#include <complex>
#include <cstddef>
#include <span>

namespace normprop::detail {

/// Real <-> half-complex FFT of fixed length backed by FFTW. Plans are created
/// under a process-wide lock (the FFTW planner is not reentrant); execution is
/// thread-safe on distinct objects.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const noexcept { return n_; }
  std::size_t spectrum_size() const noexcept { return n_ / 2 + 1; }

  std::span<double> real() noexcept { return {real_, n_}; }
  std::span<std::complex<double>> spectrum() noexcept;

  /// real() -> spectrum()
  void forward();
  /// spectrum() -> real(), unnormalized (result is n times the inverse transform).
  void backward();

 private:
  std::size_t n_;
  double* real_;
  void* spectrum_;
  void* forward_plan_;
  void* backward_plan_;
};

}  // namespace normprop::detail

#endif  // NORMPROP_SRC_FFT_HPP_
