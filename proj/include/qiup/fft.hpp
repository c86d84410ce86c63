#pragma once

#include <complex>
#include <span>

namespace qiup::fft {

enum class Direction {
  Forward,   ///< sum x_k e^{-2 pi i k n / N}
  Backward,  ///< sum x_k e^{+2 pi i k n / N}, unnormalized
};

/// In-place multidimensional DFT over a row-major array with the given
/// extents (FFTW backend).
void transform(std::span<std::complex<double>> data, std::span<const int> extents, Direction dir);

/// 2-D convenience overload.
void transform_2d(std::span<std::complex<double>> data, int rows, int cols, Direction dir);

/// Signed integer frequency index of DFT bin k for length n (0, 1, ..., -1).
inline int signed_bin(int k, int n) { return k <= (n - 1) / 2 ? k : k - n; }

}  // namespace qiup::fft
