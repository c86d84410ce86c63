#include "qiup/biphoton.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qiup/errors.hpp"
#include "qiup/fft.hpp"

namespace qiup::biphoton {

namespace {
constexpr double kPi = std::numbers::pi;

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }
}  // namespace

void GaussianPumpModel::validate() const {
  if (!positive_finite(waist_m)) throw ValidationError("pump waist must be positive");
}

void CrystalModel::validate() const {
  if (!positive_finite(length_m) || !positive_finite(n_signal) || !positive_finite(n_idler) ||
      !positive_finite(lambda_signal_m) || !positive_finite(lambda_idler_m))
    throw ValidationError("crystal length, indices and wavelengths must be positive");
}

double momentum_density_gaussian(TransverseMomentum qs, TransverseMomentum qi,
                                 const GaussianPumpModel& pump) {
  pump.validate();
  const double w2 = pump.waist_m * pump.waist_m;
  const double ux = qs.qx + qi.qx;
  const double uy = qs.qy + qi.qy;
  return w2 / (2.0 * kPi) * std::exp(-0.5 * (ux * ux + uy * uy) * w2);
}

double position_correlation_strength(const CrystalModel& crystal) {
  crystal.validate();
  return 4.0 * kPi / (crystal.length_m * crystal.wavelength_sum());
}

double position_density_gaussian(Vec2 rho_c, Vec2 rho_o, const CrystalModel& crystal,
                                 double m_signal, double m_idler) {
  if (m_signal == 0.0 || m_idler == 0.0 || !std::isfinite(m_signal) || !std::isfinite(m_idler))
    throw ValidationError("magnifications must be finite and nonzero");
  const double a = position_correlation_strength(crystal);
  const double dx = rho_c.x / m_signal - rho_o.x / m_idler;
  const double dy = rho_c.y / m_signal - rho_o.y / m_idler;
  return a / kPi * std::exp(-a * (dx * dx + dy * dy));
}

namespace {

// Per-axis densities used for sampled grids: columns = signal coordinate.
RealGrid sample_pair(std::size_t points, double pitch, auto&& density) {
  if (points < 2) throw ValidationError("grid needs at least two points per axis");
  RealGrid g(points, points, pitch);
  for (std::size_t r = 0; r < points; ++r)
    for (std::size_t c = 0; c < points; ++c) g(r, c) = density(g.x(c), g.y(r));
  return g;
}

}  // namespace

RealGrid sample_momentum_density(const GaussianPumpModel& pump, const GridSpec& spec) {
  pump.validate();
  const double w = pump.waist_m;
  const double pitch = 2.0 * spec.extent_sigmas / w / static_cast<double>(spec.points - 1);
  return sample_pair(spec.points, pitch, [w](double qs, double qi) {
    const double u = qs + qi;
    return w / std::sqrt(2.0 * kPi) * std::exp(-0.5 * u * u * w * w);
  });
}

RealGrid sample_position_density(const CrystalModel& crystal, const GridSpec& spec) {
  const double a = position_correlation_strength(crystal);
  const double sigma = 1.0 / std::sqrt(2.0 * a);
  const double pitch = 2.0 * spec.extent_sigmas * sigma / static_cast<double>(spec.points - 1);
  return sample_pair(spec.points, pitch, [a](double rs, double ri) {
    const double d = rs - ri;
    return std::sqrt(a / kPi) * std::exp(-a * d * d);
  });
}

JointMomentumAmplitude::JointMomentumAmplitude(Shape shape, Spacing spacing)
    : shape_(shape), spacing_(spacing) {
  std::size_t total = 1;
  for (int k = 0; k < 4; ++k) {
    if (shape[k] < 1) throw ValidationError("joint amplitude needs >= 1 sample per axis");
    if (!positive_finite(spacing[k])) throw ValidationError("axis spacing must be positive");
    total *= static_cast<std::size_t>(shape[k]);
  }
  data_.assign(total, {});
}

JointMomentumAmplitude JointMomentumAmplitude::from_function(
    Shape shape, Spacing spacing,
    const std::function<std::complex<double>(TransverseMomentum, TransverseMomentum)>& f) {
  JointMomentumAmplitude c(shape, spacing);
  std::size_t idx = 0;
  for (int a = 0; a < shape[0]; ++a)
    for (int b = 0; b < shape[1]; ++b)
      for (int i = 0; i < shape[2]; ++i)
        for (int j = 0; j < shape[3]; ++j)
          c.data_[idx++] = f({c.coordinate(0, a), c.coordinate(1, b)},
                             {c.coordinate(2, i), c.coordinate(3, j)});
  return c;
}

JointMomentumAmplitude JointMomentumAmplitude::double_gaussian(Shape shape, Spacing spacing,
                                                               double pump_waist_m,
                                                               double sigma_m) {
  if (!positive_finite(pump_waist_m) || !positive_finite(sigma_m))
    throw ValidationError("double-Gaussian widths must be positive");
  const double w2 = pump_waist_m * pump_waist_m;
  const double s2 = sigma_m * sigma_m;
  auto c = from_function(shape, spacing, [&](TransverseMomentum qs, TransverseMomentum qi) {
    const double px = qs.qx + qi.qx, py = qs.qy + qi.qy;
    const double mx = qs.qx - qi.qx, my = qs.qy - qi.qy;
    return std::complex<double>(std::exp(-(px * px + py * py) * w2 / 4.0 - (mx * mx + my * my) * s2));
  });
  c.normalize();
  return c;
}

double JointMomentumAmplitude::total_probability() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return s * spacing_[0] * spacing_[1] * spacing_[2] * spacing_[3];
}

void JointMomentumAmplitude::normalize() {
  const double p = total_probability();
  if (!(p > 0.0)) throw ValidationError("cannot normalize a zero amplitude");
  const double f = 1.0 / std::sqrt(p);
  for (auto& v : data_) v *= f;
}

bool JointMomentumAmplitude::normalized(double tolerance) const {
  return std::abs(total_probability() - 1.0) <= tolerance;
}

double JointDensity::total_probability() const {
  double s = 0.0;
  for (double v : data) s += v;
  return s * spacing[0] * spacing[1] * spacing[2] * spacing[3];
}

namespace {

struct Strides {
  std::array<std::size_t, 4> s;
  explicit Strides(const std::array<int, 4>& shape) {
    s[3] = 1;
    for (int k = 2; k >= 0; --k) s[k] = s[k + 1] * static_cast<std::size_t>(shape[k + 1]);
  }
};

}  // namespace

double JointDensity::correlation_coefficient(int transverse_axis) const {
  if (transverse_axis != 0 && transverse_axis != 1)
    throw ValidationError("transverse axis must be 0 (x) or 1 (y)");
  const int as = transverse_axis, ai = transverse_axis + 2;
  const Strides st(shape);
  double w = 0, ms = 0, mi = 0, mss = 0, mii = 0, msi = 0;
  for (std::size_t idx = 0; idx < data.size(); ++idx) {
    const double p = data[idx];
    if (p == 0.0) continue;
    const int js = static_cast<int>((idx / st.s[as]) % shape[as]);
    const int ji = static_cast<int>((idx / st.s[ai]) % shape[ai]);
    const double xs = coordinate(as, js), xi = coordinate(ai, ji);
    w += p;
    ms += p * xs;
    mi += p * xi;
    mss += p * xs * xs;
    mii += p * xi * xi;
    msi += p * xs * xi;
  }
  if (!(w > 0.0)) throw ValidationError("density is identically zero");
  ms /= w;
  mi /= w;
  const double vs = mss / w - ms * ms, vi = mii / w - mi * mi;
  if (!(vs > 0.0) || !(vi > 0.0)) return 0.0;
  return (msi / w - ms * mi) / std::sqrt(vs * vi);
}

double JointDensity::factorization_residual() const {
  const std::size_t ns = static_cast<std::size_t>(shape[0]) * shape[1];
  const std::size_t ni = static_cast<std::size_t>(shape[2]) * shape[3];
  std::vector<double> ps(ns, 0.0), pi(ni, 0.0);
  double total = 0.0, peak = 0.0;
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t i = 0; i < ni; ++i) {
      const double p = data[s * ni + i];
      ps[s] += p;
      pi[i] += p;
      total += p;
      peak = std::max(peak, p);
    }
  if (!(total > 0.0)) throw ValidationError("density is identically zero");
  double worst = 0.0;
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t i = 0; i < ni; ++i)
      worst = std::max(worst, std::abs(data[s * ni + i] - ps[s] * pi[i] / total));
  return worst / peak;
}

JointDensity position_density_from_amplitude(const JointMomentumAmplitude& c) {
  const auto& shape = c.shape();
  const Strides st(shape);
  const auto& data = c.data();

  double peak = 0.0;
  for (const auto& v : data) peak = std::max(peak, std::abs(v));
  if (!(peak > 0.0)) throw ValidationError("joint amplitude is identically zero");
  double boundary = 0.0;
  for (std::size_t idx = 0; idx < data.size(); ++idx) {
    for (int k = 0; k < 4; ++k) {
      if (shape[k] == 1) continue;
      const int j = static_cast<int>((idx / st.s[k]) % shape[k]);
      if (j == 0 || j == shape[k] - 1) {
        boundary = std::max(boundary, std::abs(data[idx]));
        break;
      }
    }
  }
  if (boundary >= 1e-3 * peak)
    throw PreconditionError("joint amplitude does not decay at the grid boundary (aliasing risk)");

  // Centre the transform: origin at index n/2 on both sides.
  std::vector<std::complex<double>> buf(data);
  constexpr double kTwoPi = 2.0 * kPi;
  for (std::size_t idx = 0; idx < buf.size(); ++idx) {
    double phase = 0.0;
    for (int k = 0; k < 4; ++k) {
      const int j = static_cast<int>((idx / st.s[k]) % shape[k]);
      phase -= kTwoPi * static_cast<double>(j) * (shape[k] / 2) / shape[k];
    }
    buf[idx] *= std::polar(1.0, phase);
  }
  fft::transform(buf, shape, fft::Direction::Backward);

  JointDensity out;
  out.shape = shape;
  double dq4 = 1.0;
  for (int k = 0; k < 4; ++k) {
    out.spacing[k] = kTwoPi / (shape[k] * c.spacing()[k]);
    dq4 *= c.spacing()[k];
  }
  // Unitary continuous-transform scaling: psi = (2 pi)^-2 sum C e^{i q.rho} dq^4.
  const double scale = dq4 / (kTwoPi * kTwoPi);
  out.data.resize(buf.size());
  for (std::size_t idx = 0; idx < buf.size(); ++idx) out.data[idx] = std::norm(scale * buf[idx]);
  return out;
}

}  // namespace qiup::biphoton
