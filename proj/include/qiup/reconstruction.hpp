#pragma once

#include <optional>
#include <span>

#include "qiup/grid.hpp"
#include "qiup/imaging.hpp"

namespace qiup::reconstruction {

using imaging::CameraFrame;

/// Per-pixel (max - min) / (max + min) over a phase scan of at least 8
/// frames covering a full period. Pixels with max + min = 0 map to 0.
RealGrid visibility_map(std::span<const CameraFrame> frames);

/// Per-pixel max - min over the same kind of scan.
RealGrid image_function(std::span<const CameraFrame> frames);

/// Sum_j frame_j exp(+i phi_j) over K >= 3 frames whose phase tags are
/// equally spaced by 2 pi / K. For frames 1 + |T| cos(phi - arg T) the result
/// is (K/2) T, so its argument is arg T.
ComplexGrid phase_stepping(std::span<const CameraFrame> frames);

/// phase_stepping output divided by K/2: an estimate of T itself.
ComplexGrid phase_stepping_normalized(std::span<const CameraFrame> frames);

/// Single-frame reconstruction from a frame carrying a linear phase
/// exp(i carrier . rho) in its interference term. The sideband is isolated
/// with a circular filter of the given radius (rad/m, default |carrier|/2),
/// shifted to baseband, rescaled and referred to the frame's phase tag, so
/// the result estimates T.
///
/// Throws PreconditionError if |carrier| is not below half the Nyquist
/// frequency, or if the filter radius exceeds |carrier|/2.
ComplexGrid off_axis_holography(const CameraFrame& frame, Vec2 carrier,
                                std::optional<double> filter_radius = std::nullopt);

/// Removes a known linear phase exp(-i carrier . rho) from a reconstruction,
/// using the grid's own coordinates.
ComplexGrid remove_carrier(const ComplexGrid& field, Vec2 carrier);

struct PhaseComparison {
  double rms_rad;
  std::size_t pixels;
};

/// RMS of the wrapped phase difference arg(a) - arg(b) over pixels at least
/// `guard` from the border where both |a| and |b| exceed min_magnitude.
PhaseComparison phase_rms(const ComplexGrid& a, const ComplexGrid& b, std::size_t guard = 0,
                          double min_magnitude = 1e-6);

/// Wraps an angle to (-pi, pi].
double wrap_pi(double angle);

}  // namespace qiup::reconstruction
