#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qiup/biphoton.hpp"
#include "qiup/grid.hpp"

namespace qiup::imaging {

using biphoton::CrystalModel;
using biphoton::GaussianPumpModel;
using biphoton::TransverseMomentum;

/// Sampled complex transmittance T(rho_o) of the object, piecewise constant
/// over pixels, extended beyond the map by its edge values.
class ObjectMap {
 public:
  /// Throws ValidationError if |T| > 1 anywhere.
  explicit ObjectMap(ComplexGrid transmittance);

  static ObjectMap uniform(std::size_t rows, std::size_t cols, double pitch, Complex t);
  static ObjectMap from_polar(const RealGrid& magnitude, const RealGrid& phase);

  const ComplexGrid& transmittance() const { return t_; }
  double pitch() const { return t_.pitch(); }
  std::size_t rows() const { return t_.rows(); }
  std::size_t cols() const { return t_.cols(); }

  /// Value of the pixel containing rho (clamped to the map).
  Complex at(Vec2 rho) const;

 private:
  ComplexGrid t_;
};

/// Far-field (momentum-correlation) layout: object and camera sit in the
/// Fourier planes of the sources behind lenses f_I and f_c.
struct GeometryMC {
  double f_idler_m;
  double f_camera_m;
  double lambda_signal_m;
  double lambda_idler_m;
  GaussianPumpModel pump;
  double phi_in = 0.0;
  /// Linear phase (rad/m at the camera) from a tilted signal arm.
  Vec2 carrier{};

  void validate() const;
  /// f_c lambda_s / (f_I lambda_I); erect-image convention.
  double magnification() const;
  /// Per-axis standard deviation of the object-plane blur kernel,
  /// lambda_I f_I / (2 pi w_p).
  double object_blur_std() const;
};

/// Near-field (position-correlation) layout: crystal planes imaged onto the
/// object with M_I and onto the camera with M_s.
struct GeometryPC {
  double m_signal;
  double m_idler;
  CrystalModel crystal;
  double phi_in = 0.0;
  /// phi_s(rho_c) sampled on the camera grid.
  std::optional<RealGrid> signal_phase_map;
  /// phi_I(rho_o) + phi_I'(rho_o / M_I) sampled on the object grid.
  std::optional<RealGrid> idler_phase_map;
  Vec2 carrier{};

  void validate() const;
  /// |M_s / M_I|.
  double magnification() const;
  /// Per-axis standard deviation of the object-plane kernel, M_I / sqrt(2a).
  double object_blur_std() const;
};

enum class Target { Object, Camera };

/// rho = lambda f q / (2 pi) with (lambda_I, f_I) or (lambda_s, f_c).
Vec2 map_coordinates_mc(TransverseMomentum q, const GeometryMC& g, Target which);

struct CameraFrame {
  RealGrid grid;
  double phase_tag = 0.0;
};

struct CameraSpec {
  std::size_t rows;
  std::size_t cols;
  double pitch_m;
};

enum class QuadratureRule {
  /// Exact Gaussian integral over each (piecewise-constant) object pixel.
  PixelExact,
  /// Tensor Gauss-Hermite nodes in the anti-correlated coordinate.
  GaussHermite,
};

enum class CorrelationModel {
  Correlated,
  /// P(q_s, q_I) = P_s(q_s) P_I(q_I): the idler weight no longer follows the
  /// camera pixel.
  Separable,
};

struct SimulationOptions {
  QuadratureRule quadrature = QuadratureRule::PixelExact;
  int hermite_nodes = 32;
  CorrelationModel correlation = CorrelationModel::Correlated;
  /// Object-plane std of P_I for the separable model; default: a quarter of
  /// the smaller object extent.
  std::optional<double> separable_idler_std_m;
  /// Default: object shape with pitch M * object pitch.
  std::optional<CameraSpec> camera;
};

/// Phase-independent part of the camera signal. A frame at interferometric
/// phase phi is background + Re(e^{i (phi + signal_phase)} coherent).
class InterferenceField {
 public:
  InterferenceField(RealGrid background, ComplexGrid coherent, RealGrid signal_phase);

  CameraFrame frame(double phi_in) const;
  /// K frames at phi_start + 2 pi j / K.
  std::vector<CameraFrame> scan(int frames, double phi_start = 0.0) const;

  const RealGrid& background() const { return background_; }
  const ComplexGrid& coherent() const { return coherent_; }
  const RealGrid& signal_phase() const { return signal_phase_; }

 private:
  RealGrid background_;
  ComplexGrid coherent_;
  RealGrid signal_phase_;
};

/// General momentum-correlation integral. Throws PreconditionError when the
/// Gauss-Hermite rule is selected and the blur spans fewer than 4 object
/// pixels.
InterferenceField interference_field_mc(const ObjectMap& obj, const GeometryMC& g,
                                        const SimulationOptions& opt = {});
/// Perfect momentum correlation (delta kernel): rho_o = rho_c / M.
InterferenceField interference_field_mc_ideal(const ObjectMap& obj, const GeometryMC& g,
                                              const SimulationOptions& opt = {});
InterferenceField interference_field_pc(const ObjectMap& obj, const GeometryPC& g,
                                        const SimulationOptions& opt = {});
InterferenceField interference_field_pc_ideal(const ObjectMap& obj, const GeometryPC& g,
                                              const SimulationOptions& opt = {});

/// Frame at g.phi_in. Empty object at phi_in = 0 gives 2.0; opaque gives 1.0.
CameraFrame simulate_frame_mc(const ObjectMap& obj, const GeometryMC& g,
                              const SimulationOptions& opt = {});
CameraFrame simulate_frame_mc_ideal(const ObjectMap& obj, const GeometryMC& g,
                                    const SimulationOptions& opt = {});
CameraFrame simulate_frame_pc(const ObjectMap& obj, const GeometryPC& g,
                              const SimulationOptions& opt = {});
CameraFrame simulate_frame_pc_ideal(const ObjectMap& obj, const GeometryPC& g,
                                    const SimulationOptions& opt = {});

/// Largest value of a normalized frame (fully constructive, |T| = 1).
inline constexpr double kFrameScale = 2.0;

/// Per-pixel Poisson counts with mean frame * mean_counts / kFrameScale,
/// returned rescaled to frame units. Deterministic for a given seed.
CameraFrame add_shot_noise(const CameraFrame& frame, double mean_counts_per_pixel,
                           std::uint64_t seed);

}  // namespace qiup::imaging
