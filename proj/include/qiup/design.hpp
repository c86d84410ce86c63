#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "qiup/biphoton.hpp"
#include "qiup/imaging.hpp"

namespace qiup::design {

using biphoton::CrystalModel;
using biphoton::GaussianPumpModel;
using imaging::GeometryMC;
using imaging::GeometryPC;

// Momentum-correlation (far-field) figures.

/// Knife-edge image 0.5 erfc(-(x_c - M x0) / sigma), rising from 0 to 1
/// across the image of the edge at object position x0.
double esf_mc(double x_camera_m, double edge_x0_m, const GeometryMC& g);
/// sigma = f_c lambda_s / (sqrt(2) pi w_p); the ESF climbs from 24% to 76%
/// over this distance.
double blur_sigma_mc(const GeometryMC& g);

struct Resolution {
  double res_m;
  double res_fwhm_m;
};
/// res = f_I lambda_I / (sqrt(2) pi w_p), res_fwhm = 2 sqrt(ln 2) res.
Resolution resolution_mc(double f_idler_m, double lambda_idler_m, const GaussianPumpModel& pump);
Resolution resolution_mc(const GeometryMC& g);

/// Half-width idler divergence behind a crystal of length L.
double idler_divergence(const CrystalModel& crystal);
/// 2 f_I theta_I.
double fov_mc(double f_idler_m, double theta_idler_rad);
/// 5 w_p sqrt(n / (L (lambda_I + lambda_s))) with n = n_signal.
double modes_mc(const CrystalModel& crystal, const GaussianPumpModel& pump);

// Position-correlation (near-field) figures.

/// Image function of two points at x_o = +/- d/2 (unnormalized, peak 1 for
/// well separated points).
double two_point_image(double d_m, const GeometryPC& g, double x_camera_m, double y_camera_m);
/// Dip-to-peak ratio G(0,0) / max_x G(x,0); 1 when the image has one hump.
double beta_two_point(double d_m, const GeometryPC& g);
/// Separation at which beta_two_point reaches beta_max. Uses
/// 0.53 M_I sqrt(L (lambda_I + lambda_s)) for beta_max = 0.81.
double d_min(const GeometryPC& g, double beta_max = 0.81);
/// Always solves beta_two_point(d) = beta_max numerically.
double d_min_root(const GeometryPC& g, double beta_max = 0.81);

/// 0.44 M_I sqrt(L (lambda_I + lambda_s) / n).
double resolution_pc_fwhm(const GeometryPC& g);
/// sqrt(2 ln 2) M_I w_p.
double fov_pc(const GaussianPumpModel& pump, double m_idler);
/// 2.7 w_p sqrt(n / (L (lambda_I + lambda_s))).
double modes_pc(const CrystalModel& crystal, const GaussianPumpModel& pump);

// Spectral-domain figures.

/// 0.44 lambda_I^2 / delta_lambda.
double oct_axial_resolution(double lambda_idler_m, double delta_lambda_m);
/// delta_lambda = lambda^2 delta_nu / c.
double bandwidth_wavelength(double lambda_m, double delta_nu_hz);

// Comparison table.

enum class Configuration { MC, PC };

struct DesignReport {
  std::string name;
  Configuration configuration;
  double res_fwhm_m;
  double fov_m;
  double modes_per_direction;
  nlohmann::json inputs;
  /// Published experimental values, when available (SI units, or null).
  nlohmann::json experiment;
};

struct McInputs {
  double f_idler_m;
  CrystalModel crystal;
  GaussianPumpModel pump;
};

struct PcInputs {
  double m_idler;
  CrystalModel crystal;
  GaussianPumpModel pump;
};

DesignReport design_mc(const std::string& name, const McInputs& in);
DesignReport design_pc(const std::string& name, const PcInputs& in);

McInputs preset_fuenzalida();
McInputs preset_microscopy();
PcInputs preset_position_correlation();

/// The three literature setups side by side.
std::vector<DesignReport> comparison_report();

nlohmann::json to_json(const DesignReport& r);
nlohmann::json to_json(const std::vector<DesignReport>& rows);
/// Fixed-width table with rows res_fwhm / FoV / m and one column per setup.
std::string format_table(const std::vector<DesignReport>& rows);

}  // namespace qiup::design
