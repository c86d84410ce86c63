#pragma once

#include <complex>
#include <vector>

namespace qiup::interferometer {

/// Complex field transmittance |T| e^{i gamma} of an object placed in one
/// interferometer arm.
class Transmittance {
 public:
  /// Throws ValidationError unless magnitude is in [0, 1] and both values are finite.
  Transmittance(double magnitude, double phase);

  static Transmittance from_complex(std::complex<double> t);

  double magnitude() const { return magnitude_; }
  /// Phase reduced to [0, 2 pi).
  double phase() const { return phase_; }
  std::complex<double> value() const { return std::polar(magnitude_, phase_); }

 private:
  double magnitude_;
  double phase_;
};

/// Tunable interferometric phase, stored reduced mod 2 pi.
class PhaseSetting {
 public:
  explicit PhaseSetting(double phi);
  double radians() const { return phi_; }

 private:
  double phi_;
};

/// Reduce an angle to [0, 2 pi).
double wrap_two_pi(double angle);

enum class MzPort { A, B };
enum class ZwmPort { S1, S2 };

/// Mach-Zehnder count rate (1 + |T|^2 +/- 2|T| cos(phi - gamma)) / 4.
double mz_count_rate(const Transmittance& t, PhaseSetting phi, MzPort port);
/// 2|T| / (1 + |T|^2).
double mz_visibility(const Transmittance& t);

/// Induced-coherence (ZWM) singles rate (1 +/- |T| cos(phi + gamma)) / 2.
double zwm_count_rate(const Transmittance& t, PhaseSetting phi, ZwmPort port);

/// SU(1,1) singles rate (1 + |T| cos(phi + gamma)) / 2, the same at the signal
/// and idler outputs. For double-pass layouts pass T' = T^2 explicitly.
double su11_count_rate(const Transmittance& t, PhaseSetting phi);

struct TwoParticleRates {
  double singles;
  double coincidence_visibility;
};

/// Separate-idler (two-particle) interferometer: flat singles, coincidence
/// visibility 2|T| / (|T|^2 + 1).
TwoParticleRates two_particle_rates(const Transmittance& t, PhaseSetting phi);

/// Sampled phase scan of a normalized rate.
struct RateCurve {
  std::vector<double> phases;
  std::vector<double> rates;
};

/// Samples f(phi) at n equally spaced points over [start, start + 2 pi).
template <typename F>
RateCurve scan(F&& rate_at, int samples, double start = 0.0) {
  RateCurve curve;
  curve.phases.reserve(samples);
  curve.rates.reserve(samples);
  constexpr double kTwoPi = 6.283185307179586476925;
  for (int k = 0; k < samples; ++k) {
    const double phi = start + kTwoPi * k / samples;
    curve.phases.push_back(phi);
    curve.rates.push_back(rate_at(phi));
  }
  return curve;
}

/// (R_max - R_min) / (R_max + R_min) over the samples; zero for an all-zero
/// curve. Requires at least 8 samples per period covering a full 2 pi period
/// (equally spaced scans of n points span 2 pi (n-1)/n, which is accepted).
double visibility_from_scan(const RateCurve& curve);

}  // namespace qiup::interferometer
