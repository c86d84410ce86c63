#include "qiup/interferometer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qiup/errors.hpp"

namespace qiup::interferometer {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double wrap_two_pi(double angle) {
  double r = std::fmod(angle, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a value just below a multiple of 2 pi can round up to 2 pi.
  if (r >= kTwoPi) r = 0.0;
  return r;
}

Transmittance::Transmittance(double magnitude, double phase) {
  if (!std::isfinite(magnitude) || !std::isfinite(phase))
    throw ValidationError("transmittance must be finite");
  if (magnitude < 0.0 || magnitude > 1.0)
    throw ValidationError("transmittance magnitude must lie in [0, 1]");
  magnitude_ = magnitude;
  phase_ = wrap_two_pi(phase);
}

Transmittance Transmittance::from_complex(std::complex<double> t) {
  return Transmittance(std::abs(t), std::arg(t));
}

PhaseSetting::PhaseSetting(double phi) {
  if (!std::isfinite(phi)) throw ValidationError("phase setting must be finite");
  phi_ = wrap_two_pi(phi);
}

double mz_count_rate(const Transmittance& t, PhaseSetting phi, MzPort port) {
  const double m = t.magnitude();
  const double sign = port == MzPort::A ? 1.0 : -1.0;
  return (1.0 + m * m + sign * 2.0 * m * std::cos(phi.radians() - t.phase())) / 4.0;
}

double mz_visibility(const Transmittance& t) {
  const double m = t.magnitude();
  return 2.0 * m / (1.0 + m * m);
}

double zwm_count_rate(const Transmittance& t, PhaseSetting phi, ZwmPort port) {
  const double sign = port == ZwmPort::S1 ? 1.0 : -1.0;
  return (1.0 + sign * t.magnitude() * std::cos(phi.radians() + t.phase())) / 2.0;
}

double su11_count_rate(const Transmittance& t, PhaseSetting phi) {
  return (1.0 + t.magnitude() * std::cos(phi.radians() + t.phase())) / 2.0;
}

TwoParticleRates two_particle_rates(const Transmittance& t, PhaseSetting /*phi*/) {
  const double m = t.magnitude();
  return {0.5, 2.0 * m / (m * m + 1.0)};
}

double visibility_from_scan(const RateCurve& curve) {
  if (curve.rates.empty() || curve.rates.size() != curve.phases.size())
    throw ValidationError("rate curve must be non-empty with one rate per phase");
  const std::size_t n = curve.phases.size();
  if (n < 8) throw ValidationError("visibility scan needs at least 8 samples");
  const auto [lo, hi] = std::minmax_element(curve.phases.begin(), curve.phases.end());
  const double span = *hi - *lo;
  // Equally spaced scans of n points over one period cover 2 pi (n-1)/n.
  const double required = kTwoPi * (static_cast<double>(n) - 1.0) / static_cast<double>(n);
  if (span < required * (1.0 - 1e-12))
    throw ValidationError("visibility scan must span a full 2 pi period");
  for (double r : curve.rates)
    if (!(r >= 0.0)) throw ValidationError("rates must be nonnegative");

  const auto [rmin, rmax] = std::minmax_element(curve.rates.begin(), curve.rates.end());
  const double denom = *rmax + *rmin;
  if (denom == 0.0) return 0.0;
  return (*rmax - *rmin) / denom;
}

}  // namespace qiup::interferometer
