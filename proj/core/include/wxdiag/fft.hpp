#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace wxdiag {

/// In-place 2D complex DFT on a row-major (rows x cols) array, backed by FFTW.
/// forward computes sum x * exp(-2 pi i ...) without scaling; inverse uses
/// exp(+2 pi i ...) and is also unscaled.
///
/// Instances are cheap to create and must not be shared between threads;
/// planning is serialised internally.
class Fft2d {
 public:
  Fft2d(std::size_t rows, std::size_t cols);
  ~Fft2d();
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  void forward(std::span<std::complex<double>> data);
  void inverse(std::span<std::complex<double>> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

 private:
  void run(void* plan, std::span<std::complex<double>> data);

  std::size_t rows_;
  std::size_t cols_;
  void* buffer_ = nullptr;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace wxdiag
