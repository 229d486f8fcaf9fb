#include "wxdiag/fft.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>

#include <fftw3.h>

#include "wxdiag/error.hpp"

namespace wxdiag {

namespace {

// FFTW's planner and plan destruction are not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Fft2d::Fft2d(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
  const std::size_t n = rows * cols;
  buffer_ = fftw_malloc(sizeof(fftw_complex) * n);
  if (!buffer_) throw Error(ErrorKind::IoError, "fftw_malloc failed");
  auto* buf = static_cast<fftw_complex*>(buffer_);
  std::lock_guard lock(planner_mutex());
  forward_plan_ = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), buf, buf,
                                   FFTW_FORWARD, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), buf, buf,
                                   FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft2d::~Fft2d() {
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_free(buffer_);
}

void Fft2d::forward(std::span<std::complex<double>> data) { run(forward_plan_, data); }

void Fft2d::inverse(std::span<std::complex<double>> data) { run(inverse_plan_, data); }

void Fft2d::run(void* plan, std::span<std::complex<double>> data) {
  if (data.size() != rows_ * cols_) throw Error(ErrorKind::InvalidField, "FFT size mismatch");
  // std::complex<double> is layout-compatible with fftw_complex.
  std::memcpy(buffer_, data.data(), sizeof(fftw_complex) * data.size());
  fftw_execute(static_cast<fftw_plan>(plan));
  std::memcpy(data.data(), buffer_, sizeof(fftw_complex) * data.size());
}

}  // namespace wxdiag
