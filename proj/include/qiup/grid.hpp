#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qiup/errors.hpp"

namespace qiup {

using Complex = std::complex<double>;

/// Transverse 2-vector in SI units (m or rad/m depending on context).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Row-major 2-D sampled map with square pixels and a centred origin.
///
/// Sample (row, col) sits at x = (col - (cols-1)/2) * pitch and
/// y = (row - (rows-1)/2) * pitch, so the geometric centre of the grid is the
/// optical axis regardless of parity.
template <typename T>
class Grid2D {
 public:
  Grid2D() = default;
  Grid2D(std::size_t rows, std::size_t cols, double pitch, T fill = T{})
      : rows_(rows), cols_(cols), pitch_(pitch), data_(rows * cols, fill) {
    if (rows == 0 || cols == 0) throw ValidationError("grid dimensions must be positive");
    if (!(pitch > 0.0)) throw ValidationError("grid pitch must be positive");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  double pitch() const { return pitch_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  double x(std::size_t c) const { return (static_cast<double>(c) - 0.5 * (cols_ - 1.0)) * pitch_; }
  double y(std::size_t r) const { return (static_cast<double>(r) - 0.5 * (rows_ - 1.0)) * pitch_; }

  /// Fractional column/row coordinate of a physical position.
  double col_coord(double xpos) const { return xpos / pitch_ + 0.5 * (cols_ - 1.0); }
  double row_coord(double ypos) const { return ypos / pitch_ + 0.5 * (rows_ - 1.0); }

  bool same_shape(const Grid2D& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  double pitch_ = 1.0;
  std::vector<T> data_;
};

using RealGrid = Grid2D<double>;
using ComplexGrid = Grid2D<Complex>;

}  // namespace qiup
