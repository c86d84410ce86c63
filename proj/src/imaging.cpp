#include "qiup/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "qiup/errors.hpp"
#include "qiup/quadrature.hpp"

namespace qiup::imaging {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kKernelRadius = 8.5;  // in standard deviations

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

std::size_t clamp_index(double u, std::size_t n) {
  const double r = std::floor(u + 0.5);
  if (r <= 0.0) return 0;
  if (r >= static_cast<double>(n - 1)) return n - 1;
  return static_cast<std::size_t>(r);
}

// Standard normal CDF difference Phi(b) - Phi(a), a <= b, accurate in both tails.
double normal_mass(double a, double b) {
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  if (a >= 0.0) return 0.5 * (std::erfc(a * kInvSqrt2) - std::erfc(b * kInvSqrt2));
  if (b <= 0.0) return 0.5 * (std::erfc(-b * kInvSqrt2) - std::erfc(-a * kInvSqrt2));
  return 1.0 - 0.5 * std::erfc(-a * kInvSqrt2) - 0.5 * std::erfc(b * kInvSqrt2);
}

// Sparse rows of a 1-D resampling matrix: camera sample -> object pixels.
struct AxisWeights {
  std::vector<std::size_t> first;
  std::vector<std::vector<double>> w;
};

// centers are fractional object-pixel coordinates; sigma in object pixels.
// Pixel j covers [j - 1/2, j + 1/2]; the edge pixels extend to infinity.
AxisWeights axis_weights(std::size_t n_obj, const std::vector<double>& centers, double sigma) {
  AxisWeights out;
  out.first.resize(centers.size());
  out.w.resize(centers.size());
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < centers.size(); ++k) {
    const double u = centers[k];
    if (sigma <= 0.0) {
      out.first[k] = clamp_index(u, n_obj);
      out.w[k] = {1.0};
      continue;
    }
    const double reach = kKernelRadius * sigma + 1.0;
    const double lo_f = std::clamp(std::floor(u - reach), 0.0, static_cast<double>(n_obj - 1));
    const double hi_f = std::clamp(std::ceil(u + reach), 0.0, static_cast<double>(n_obj - 1));
    const auto lo = static_cast<std::size_t>(lo_f);
    const auto hi = static_cast<std::size_t>(hi_f);
    out.first[k] = lo;
    auto& w = out.w[k];
    w.reserve(hi - lo + 1);
    for (std::size_t j = lo; j <= hi; ++j) {
      const double a = j == 0 ? -inf : (static_cast<double>(j) - 0.5 - u) / sigma;
      const double b = j == n_obj - 1 ? inf : (static_cast<double>(j) + 0.5 - u) / sigma;
      w.push_back(normal_mass(a, b));
    }
  }
  return out;
}

struct Kernel {
  double magnification;  // camera / object, erect
  double object_std;     // per-axis, metres; zero = delta
};

CameraSpec camera_for(const ObjectMap& obj, double magnification, const SimulationOptions& opt) {
  if (opt.camera) {
    const auto& c = *opt.camera;
    if (c.rows == 0 || c.cols == 0 || !positive_finite(c.pitch_m))
      throw ValidationError("camera spec needs positive dimensions and pitch");
    return c;
  }
  return {obj.rows(), obj.cols(), obj.pitch() * magnification};
}

RealGrid make_signal_phase(const CameraSpec& cam, Vec2 carrier, const std::optional<RealGrid>& map) {
  RealGrid phase(cam.rows, cam.cols, cam.pitch_m, 0.0);
  if (map && (map->rows() != cam.rows || map->cols() != cam.cols))
    throw ValidationError("signal phase map must match the camera grid");
  for (std::size_t r = 0; r < cam.rows; ++r)
    for (std::size_t c = 0; c < cam.cols; ++c)
      phase(r, c) = carrier.x * phase.x(c) + carrier.y * phase.y(r) + (map ? (*map)(r, c) : 0.0);
  return phase;
}

// integrand: object-grid complex field A with h = 1 + Re(e^{i theta} A).
InterferenceField synthesize(const ObjectMap& obj, const ComplexGrid& integrand, Kernel k,
                             const CameraSpec& cam, RealGrid signal_phase,
                             const SimulationOptions& opt) {
  const double pitch = obj.pitch();
  RealGrid background(cam.rows, cam.cols, cam.pitch_m, 1.0);
  ComplexGrid coherent(cam.rows, cam.cols, cam.pitch_m);

  const bool separable = opt.correlation == CorrelationModel::Separable;
  double std_m = k.object_std;
  if (separable) {
    std_m = opt.separable_idler_std_m.value_or(
        0.25 * pitch * static_cast<double>(std::min(obj.rows(), obj.cols())));
    if (!positive_finite(std_m)) throw ValidationError("separable idler width must be positive");
  }

  // Object-plane centre seen by each camera sample (erect image).
  std::vector<double> col_centres(cam.cols), row_centres(cam.rows);
  const auto& t = obj.transmittance();
  for (std::size_t c = 0; c < cam.cols; ++c)
    col_centres[c] = t.col_coord(separable ? 0.0 : coherent.x(c) / k.magnification);
  for (std::size_t r = 0; r < cam.rows; ++r)
    row_centres[r] = t.row_coord(separable ? 0.0 : coherent.y(r) / k.magnification);

  if (opt.quadrature == QuadratureRule::GaussHermite && std_m > 0.0) {
    if (std::sqrt(2.0) * std_m < 4.0 * pitch)
      throw PreconditionError("object sampling too coarse: need >= 4 object pixels per blur width");
    const auto rule = quadrature::standard_normal(opt.hermite_nodes);
    const double sp = std_m / pitch;
    const auto n = rule.nodes.size();
#pragma omp parallel for schedule(static)
    for (std::size_t r = 0; r < cam.rows; ++r) {
      for (std::size_t c = 0; c < cam.cols; ++c) {
        Complex acc{};
        for (std::size_t a = 0; a < n; ++a) {
          const std::size_t row = clamp_index(row_centres[r] + sp * rule.nodes[a], t.rows());
          Complex inner{};
          for (std::size_t b = 0; b < n; ++b)
            inner += rule.weights[b] *
                     integrand(row, clamp_index(col_centres[c] + sp * rule.nodes[b], t.cols()));
          acc += rule.weights[a] * inner;
        }
        coherent(r, c) = acc;
      }
    }
    return InterferenceField(std::move(background), std::move(coherent), std::move(signal_phase));
  }

  const double sigma_px = std_m / pitch;
  const auto wx = axis_weights(t.cols(), col_centres, sigma_px);
  const auto wy = axis_weights(t.rows(), row_centres, sigma_px);

  // Horizontal pass over every object row, then vertical pass.
  ComplexGrid tmp(t.rows(), cam.cols, pitch);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t c = 0; c < cam.cols; ++c) {
      Complex acc{};
      const auto& w = wx.w[c];
      for (std::size_t q = 0; q < w.size(); ++q) acc += w[q] * integrand(i, wx.first[c] + q);
      tmp(i, c) = acc;
    }
#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < cam.rows; ++r) {
    const auto& w = wy.w[r];
    double wsum_r = 0.0;
    for (double v : w) wsum_r += v;
    for (std::size_t c = 0; c < cam.cols; ++c) {
      Complex acc{};
      for (std::size_t q = 0; q < w.size(); ++q) acc += w[q] * tmp(wy.first[r] + q, c);
      coherent(r, c) = acc;
      double wsum_c = 0.0;
      for (double v : wx.w[c]) wsum_c += v;
      background(r, c) = wsum_r * wsum_c;
    }
  }
  return InterferenceField(std::move(background), std::move(coherent), std::move(signal_phase));
}

ComplexGrid conj_transmittance(const ObjectMap& obj) {
  const auto& t = obj.transmittance();
  ComplexGrid a(t.rows(), t.cols(), t.pitch());
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c) a(r, c) = std::conj(t(r, c));
  return a;
}

ComplexGrid pc_integrand(const ObjectMap& obj, const GeometryPC& g) {
  const auto& t = obj.transmittance();
  if (g.idler_phase_map && !g.idler_phase_map->same_shape(RealGrid(t.rows(), t.cols(), t.pitch())))
    throw ValidationError("idler phase map must match the object grid");
  ComplexGrid a(t.rows(), t.cols(), t.pitch());
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c) {
      const double idler_phase = g.idler_phase_map ? (*g.idler_phase_map)(r, c) : 0.0;
      a(r, c) = std::conj(t(r, c)) * std::polar(1.0, -idler_phase);
    }
  return a;
}

}  // namespace

ObjectMap::ObjectMap(ComplexGrid transmittance) : t_(std::move(transmittance)) {
  for (const auto& v : t_.values()) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw ValidationError("object transmittance must be finite");
    if (std::abs(v) > 1.0 + 1e-12)
      throw ValidationError("object transmittance magnitude exceeds 1");
  }
}

ObjectMap ObjectMap::uniform(std::size_t rows, std::size_t cols, double pitch, Complex t) {
  return ObjectMap(ComplexGrid(rows, cols, pitch, t));
}

ObjectMap ObjectMap::from_polar(const RealGrid& magnitude, const RealGrid& phase) {
  if (!magnitude.same_shape(phase)) throw ValidationError("magnitude and phase grids differ in shape");
  ComplexGrid t(magnitude.rows(), magnitude.cols(), magnitude.pitch());
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c) {
      if (magnitude(r, c) < 0.0) throw ValidationError("magnitude must be nonnegative");
      t(r, c) = std::polar(magnitude(r, c), phase(r, c));
    }
  return ObjectMap(std::move(t));
}

Complex ObjectMap::at(Vec2 rho) const {
  return t_(clamp_index(t_.row_coord(rho.y), t_.rows()), clamp_index(t_.col_coord(rho.x), t_.cols()));
}

void GeometryMC::validate() const {
  if (!positive_finite(f_idler_m) || !positive_finite(f_camera_m) ||
      !positive_finite(lambda_signal_m) || !positive_finite(lambda_idler_m))
    throw ValidationError("MC focal lengths and wavelengths must be positive");
  pump.validate();
  if (!std::isfinite(phi_in) || !std::isfinite(carrier.x) || !std::isfinite(carrier.y))
    throw ValidationError("MC phases must be finite");
}

double GeometryMC::magnification() const {
  return f_camera_m * lambda_signal_m / (f_idler_m * lambda_idler_m);
}

double GeometryMC::object_blur_std() const {
  return lambda_idler_m * f_idler_m / (2.0 * kPi * pump.waist_m);
}

void GeometryPC::validate() const {
  if (m_signal == 0.0 || m_idler == 0.0 || !std::isfinite(m_signal) || !std::isfinite(m_idler))
    throw ValidationError("PC magnifications must be finite and nonzero");
  crystal.validate();
  if (!std::isfinite(phi_in) || !std::isfinite(carrier.x) || !std::isfinite(carrier.y))
    throw ValidationError("PC phases must be finite");
}

double GeometryPC::magnification() const { return std::abs(m_signal / m_idler); }

double GeometryPC::object_blur_std() const {
  return std::abs(m_idler) / std::sqrt(2.0 * biphoton::position_correlation_strength(crystal));
}

Vec2 map_coordinates_mc(TransverseMomentum q, const GeometryMC& g, Target which) {
  g.validate();
  const double s = which == Target::Object ? g.lambda_idler_m * g.f_idler_m / (2.0 * kPi)
                                           : g.lambda_signal_m * g.f_camera_m / (2.0 * kPi);
  return {s * q.qx, s * q.qy};
}

InterferenceField::InterferenceField(RealGrid background, ComplexGrid coherent, RealGrid signal_phase)
    : background_(std::move(background)),
      coherent_(std::move(coherent)),
      signal_phase_(std::move(signal_phase)) {
  if (!background_.same_shape(RealGrid(coherent_.rows(), coherent_.cols(), coherent_.pitch())) ||
      !signal_phase_.same_shape(background_))
    throw ValidationError("interference field components differ in shape");
}

CameraFrame InterferenceField::frame(double phi_in) const {
  CameraFrame f{RealGrid(background_.rows(), background_.cols(), background_.pitch()), phi_in};
  for (std::size_t r = 0; r < background_.rows(); ++r)
    for (std::size_t c = 0; c < background_.cols(); ++c) {
      const double v =
          background_(r, c) + std::real(std::polar(1.0, phi_in + signal_phase_(r, c)) * coherent_(r, c));
      f.grid(r, c) = std::max(0.0, v);
    }
  return f;
}

std::vector<CameraFrame> InterferenceField::scan(int frames, double phi_start) const {
  if (frames < 1) throw ValidationError("scan needs at least one frame");
  std::vector<CameraFrame> out;
  out.reserve(frames);
  for (int j = 0; j < frames; ++j) out.push_back(frame(phi_start + 2.0 * kPi * j / frames));
  return out;
}

InterferenceField interference_field_mc(const ObjectMap& obj, const GeometryMC& g,
                                        const SimulationOptions& opt) {
  g.validate();
  const Kernel k{g.magnification(), g.object_blur_std()};
  const auto cam = camera_for(obj, k.magnification, opt);
  return synthesize(obj, conj_transmittance(obj), k, cam, make_signal_phase(cam, g.carrier, {}), opt);
}

InterferenceField interference_field_mc_ideal(const ObjectMap& obj, const GeometryMC& g,
                                              const SimulationOptions& opt) {
  g.validate();
  const Kernel k{g.magnification(), 0.0};
  const auto cam = camera_for(obj, k.magnification, opt);
  SimulationOptions o = opt;
  o.correlation = CorrelationModel::Correlated;
  o.quadrature = QuadratureRule::PixelExact;
  return synthesize(obj, conj_transmittance(obj), k, cam, make_signal_phase(cam, g.carrier, {}), o);
}

InterferenceField interference_field_pc(const ObjectMap& obj, const GeometryPC& g,
                                        const SimulationOptions& opt) {
  g.validate();
  const Kernel k{g.magnification(), g.object_blur_std()};
  const auto cam = camera_for(obj, k.magnification, opt);
  return synthesize(obj, pc_integrand(obj, g), k, cam,
                    make_signal_phase(cam, g.carrier, g.signal_phase_map), opt);
}

InterferenceField interference_field_pc_ideal(const ObjectMap& obj, const GeometryPC& g,
                                              const SimulationOptions& opt) {
  g.validate();
  const Kernel k{g.magnification(), 0.0};
  const auto cam = camera_for(obj, k.magnification, opt);
  SimulationOptions o = opt;
  o.correlation = CorrelationModel::Correlated;
  o.quadrature = QuadratureRule::PixelExact;
  return synthesize(obj, pc_integrand(obj, g), k, cam,
                    make_signal_phase(cam, g.carrier, g.signal_phase_map), o);
}

CameraFrame simulate_frame_mc(const ObjectMap& obj, const GeometryMC& g, const SimulationOptions& opt) {
  return interference_field_mc(obj, g, opt).frame(g.phi_in);
}

CameraFrame simulate_frame_mc_ideal(const ObjectMap& obj, const GeometryMC& g,
                                    const SimulationOptions& opt) {
  return interference_field_mc_ideal(obj, g, opt).frame(g.phi_in);
}

CameraFrame simulate_frame_pc(const ObjectMap& obj, const GeometryPC& g, const SimulationOptions& opt) {
  return interference_field_pc(obj, g, opt).frame(g.phi_in);
}

CameraFrame simulate_frame_pc_ideal(const ObjectMap& obj, const GeometryPC& g,
                                    const SimulationOptions& opt) {
  return interference_field_pc_ideal(obj, g, opt).frame(g.phi_in);
}

CameraFrame add_shot_noise(const CameraFrame& frame, double mean_counts_per_pixel,
                           std::uint64_t seed) {
  if (!positive_finite(mean_counts_per_pixel))
    throw ValidationError("mean counts per pixel must be positive");
  std::mt19937_64 gen(seed);
  const double to_counts = mean_counts_per_pixel / kFrameScale;
  CameraFrame out{RealGrid(frame.grid.rows(), frame.grid.cols(), frame.grid.pitch()), frame.phase_tag};
  for (std::size_t r = 0; r < frame.grid.rows(); ++r)
    for (std::size_t c = 0; c < frame.grid.cols(); ++c) {
      const double mean = frame.grid(r, c) * to_counts;
      if (!(mean >= 0.0)) throw ValidationError("frame values must be nonnegative");
      if (mean == 0.0) continue;
      std::poisson_distribution<long long> draw(mean);
      out.grid(r, c) = static_cast<double>(draw(gen)) / to_counts;
    }
  return out;
}

}  // namespace qiup::imaging
