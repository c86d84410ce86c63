#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "qiup/grid.hpp"

namespace qiup::biphoton {

/// Transverse wave vector (rad/m).
struct TransverseMomentum {
  double qx = 0.0;
  double qy = 0.0;
};

struct GaussianPumpModel {
  double waist_m;
  void validate() const;
};

struct CrystalModel {
  double length_m;
  double n_signal;
  double n_idler;
  double lambda_signal_m;  ///< vacuum wavelength
  double lambda_idler_m;   ///< vacuum wavelength
  void validate() const;
  double wavelength_sum() const { return lambda_signal_m + lambda_idler_m; }
};

/// Momentum-correlation density exp(-|q_s + q_I|^2 w_p^2 / 2), normalized so
/// its integral over the anti-correlated coordinate q_s + q_I is one.
double momentum_density_gaussian(TransverseMomentum q_signal, TransverseMomentum q_idler,
                                 const GaussianPumpModel& pump);

/// Coefficient a = 4 pi / (L (lambda_I + lambda_s)) of the near-field
/// position-correlation Gaussian exp(-a |rho_c/M_s - rho_o/M_I|^2).
double position_correlation_strength(const CrystalModel& crystal);

/// Position-correlation density for camera point rho_c and object point rho_o,
/// normalized over the difference coordinate rho_c/M_s - rho_o/M_I.
double position_density_gaussian(Vec2 rho_camera, Vec2 rho_object, const CrystalModel& crystal,
                                  double m_signal, double m_idler);

/// One transverse axis of the momentum density sampled on a (q_s, q_I) grid:
/// columns index q_s, rows index q_I. Extent covers +/- extent_sigmas of the
/// anti-correlation width 1/w_p.
struct GridSpec {
  std::size_t points = 256;
  double extent_sigmas = 5.0;
};
RealGrid sample_momentum_density(const GaussianPumpModel& pump, const GridSpec& spec = {});
/// One transverse axis of the position density on a (rho_c, rho_o) grid with
/// unit magnifications; columns index the signal position.
RealGrid sample_position_density(const CrystalModel& crystal, const GridSpec& spec = {});

/// Joint amplitude C(q_s, q_I) sampled on a 4-D grid, axes ordered
/// (q_sx, q_sy, q_Ix, q_Iy), row-major. Axis k sample j sits at
/// (j - n_k/2) * spacing_k, so index n_k/2 is the origin.
class JointMomentumAmplitude {
 public:
  using Shape = std::array<int, 4>;
  using Spacing = std::array<double, 4>;

  JointMomentumAmplitude(Shape shape, Spacing spacing);

  /// Samples f(q_s, q_I) on the grid.
  static JointMomentumAmplitude from_function(
      Shape shape, Spacing spacing,
      const std::function<std::complex<double>(TransverseMomentum, TransverseMomentum)>& f);

  /// C proportional to exp(-|q_s+q_I|^2 w_p^2/4 - |q_s-q_I|^2 sigma^2), normalized.
  static JointMomentumAmplitude double_gaussian(Shape shape, Spacing spacing, double pump_waist_m,
                                                double sigma_m);

  const Shape& shape() const { return shape_; }
  const Spacing& spacing() const { return spacing_; }
  double coordinate(int axis, int index) const {
    return (index - shape_[axis] / 2) * spacing_[axis];
  }

  std::vector<std::complex<double>>& data() { return data_; }
  const std::vector<std::complex<double>>& data() const { return data_; }

  /// Sum |C|^2 (dq)^4.
  double total_probability() const;
  void normalize();
  bool normalized(double tolerance = 1e-6) const;

 private:
  Shape shape_;
  Spacing spacing_;
  std::vector<std::complex<double>> data_;
};

/// Real joint density on a 4-D grid with the same axis conventions.
struct JointDensity {
  JointMomentumAmplitude::Shape shape;
  JointMomentumAmplitude::Spacing spacing;
  std::vector<double> data;

  double coordinate(int axis, int index) const {
    return (index - shape[axis] / 2) * spacing[axis];
  }
  double total_probability() const;
  /// Pearson correlation between the signal and idler coordinate along x
  /// (axis 0 vs 2) or y (axis 1 vs 3).
  double correlation_coefficient(int transverse_axis) const;
  /// max |P - P_s P_I| / max P with P_s, P_I the two-photon marginals.
  double factorization_residual() const;
};

/// |2-D Fourier transform per photon of C|^2 on the conjugate position grid
/// (spacing 2 pi / (n dq)). Total probability is preserved. Throws
/// PreconditionError if C on any boundary face reaches 1e-3 of its peak.
JointDensity position_density_from_amplitude(const JointMomentumAmplitude& c);

}  // namespace qiup::biphoton
