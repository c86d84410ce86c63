#include "qiup/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "qiup/errors.hpp"
#include "qiup/fft.hpp"

namespace qiup::reconstruction {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

void require_same_shape(std::span<const CameraFrame> frames) {
  for (const auto& f : frames)
    if (!f.grid.same_shape(frames.front().grid))
      throw ValidationError("frames differ in shape");
}

void require_full_scan(std::span<const CameraFrame> frames) {
  const std::size_t n = frames.size();
  if (n < 8) throw ValidationError("scan needs at least 8 frames");
  require_same_shape(frames);
  std::vector<double> tags;
  for (const auto& f : frames) tags.push_back(f.phase_tag);
  const auto [lo, hi] = std::minmax_element(tags.begin(), tags.end());
  const double required = kTwoPi * (static_cast<double>(n) - 1.0) / static_cast<double>(n);
  if (*hi - *lo < required * (1.0 - 1e-12))
    throw ValidationError("scan frames must cover a full 2 pi period");
}

template <typename Reduce>
RealGrid reduce_extremes(std::span<const CameraFrame> frames, Reduce reduce) {
  const auto& first = frames.front().grid;
  RealGrid out(first.rows(), first.cols(), first.pitch());
  for (std::size_t r = 0; r < first.rows(); ++r)
    for (std::size_t c = 0; c < first.cols(); ++c) {
      double lo = first(r, c), hi = lo;
      for (const auto& f : frames) {
        lo = std::min(lo, f.grid(r, c));
        hi = std::max(hi, f.grid(r, c));
      }
      out(r, c) = reduce(lo, hi);
    }
  return out;
}

}  // namespace

double wrap_pi(double angle) {
  double r = std::remainder(angle, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

RealGrid visibility_map(std::span<const CameraFrame> frames) {
  require_full_scan(frames);
  return reduce_extremes(frames, [](double lo, double hi) {
    return hi + lo > 0.0 ? (hi - lo) / (hi + lo) : 0.0;
  });
}

RealGrid image_function(std::span<const CameraFrame> frames) {
  require_full_scan(frames);
  return reduce_extremes(frames, [](double lo, double hi) { return hi - lo; });
}

ComplexGrid phase_stepping(std::span<const CameraFrame> frames) {
  const std::size_t k = frames.size();
  if (k < 3) throw ValidationError("phase stepping needs K >= 3 frames");
  require_same_shape(frames);
  const double step = kTwoPi / static_cast<double>(k);
  for (std::size_t j = 1; j < k; ++j) {
    const double gap = wrap_pi(frames[j].phase_tag - frames[j - 1].phase_tag - step);
    if (std::abs(gap) > 1e-9) throw ValidationError("phase-stepping frames must be equally spaced by 2 pi / K");
  }
  const auto& first = frames.front().grid;
  ComplexGrid out(first.rows(), first.cols(), first.pitch());
  for (const auto& f : frames) {
    const Complex w = std::polar(1.0, f.phase_tag);
    for (std::size_t r = 0; r < first.rows(); ++r)
      for (std::size_t c = 0; c < first.cols(); ++c) out(r, c) += f.grid(r, c) * w;
  }
  return out;
}

ComplexGrid phase_stepping_normalized(std::span<const CameraFrame> frames) {
  auto out = phase_stepping(frames);
  const double scale = 2.0 / static_cast<double>(frames.size());
  for (auto& v : out.values()) v *= scale;
  return out;
}

ComplexGrid remove_carrier(const ComplexGrid& field, Vec2 carrier) {
  ComplexGrid out = field;
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c)
      out(r, c) *= std::polar(1.0, carrier.x * out.x(c) + carrier.y * out.y(r));
  return out;
}

ComplexGrid off_axis_holography(const CameraFrame& frame, Vec2 carrier,
                                std::optional<double> filter_radius) {
  const auto& g = frame.grid;
  const double pitch = g.pitch();
  const double kmag = std::hypot(carrier.x, carrier.y);
  const double nyquist = kPi / pitch;
  if (!(kmag > 0.0) || kmag >= 0.5 * nyquist)
    throw PreconditionError("carrier must be nonzero and below half the Nyquist frequency");
  const double radius = filter_radius.value_or(0.5 * kmag);
  if (!(radius > 0.0) || radius > 0.5 * kmag * (1.0 + 1e-12))
    throw PreconditionError("carrier must exceed twice the object bandwidth");

  const int rows = static_cast<int>(g.rows());
  const int cols = static_cast<int>(g.cols());
  double mean = 0.0;
  for (double v : g.values()) mean += v;
  mean /= static_cast<double>(g.size());

  std::vector<Complex> spec(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) spec[i] = g.values()[i] - mean;
  fft::transform_2d(spec, rows, cols, fft::Direction::Forward);

  // The T-bearing sideband sits at -carrier.
  const double dkx = kTwoPi / (cols * pitch);
  const double dky = kTwoPi / (rows * pitch);
  for (int r = 0; r < rows; ++r) {
    const double ky = fft::signed_bin(r, rows) * dky;
    for (int c = 0; c < cols; ++c) {
      const double kx = fft::signed_bin(c, cols) * dkx;
      if (std::hypot(kx + carrier.x, ky + carrier.y) > radius) spec[r * cols + c] = 0.0;
    }
  }
  fft::transform_2d(spec, rows, cols, fft::Direction::Backward);

  const double scale = 2.0 / static_cast<double>(g.size());
  ComplexGrid out(g.rows(), g.cols(), pitch);
  for (std::size_t r = 0; r < g.rows(); ++r)
    for (std::size_t c = 0; c < g.cols(); ++c) out(r, c) = scale * spec[r * g.cols() + c];
  out = remove_carrier(out, carrier);
  const Complex tag = std::polar(1.0, frame.phase_tag);
  for (auto& v : out.values()) v *= tag;
  return out;
}

PhaseComparison phase_rms(const ComplexGrid& a, const ComplexGrid& b, std::size_t guard,
                          double min_magnitude) {
  if (!a.same_shape(b)) throw ValidationError("phase maps differ in shape");
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t r = guard; r + guard < a.rows(); ++r)
    for (std::size_t c = guard; c + guard < a.cols(); ++c) {
      if (std::abs(a(r, c)) <= min_magnitude || std::abs(b(r, c)) <= min_magnitude) continue;
      const double d = wrap_pi(std::arg(a(r, c)) - std::arg(b(r, c)));
      acc += d * d;
      ++n;
    }
  if (n == 0) throw PreconditionError("no pixels left for the phase comparison");
  return {std::sqrt(acc / static_cast<double>(n)), n};
}

}  // namespace qiup::reconstruction
