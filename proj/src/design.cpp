#include "qiup/design.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "qiup/errors.hpp"

namespace qiup::design {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;
constexpr double kSpeedOfLight = 299792458.0;

void require_positive(double v, const char* what) {
  if (!(std::isfinite(v) && v > 0.0)) throw ValidationError(std::string(what) + " must be positive");
}

// exp(-a u^2) exponent scale of the position-correlation density.
double pc_strength(const GeometryPC& g) { return biphoton::position_correlation_strength(g.crystal); }

double pc_length_scale(const GeometryPC& g) {
  return std::abs(g.m_idler) * std::sqrt(g.crystal.length_m * g.crystal.wavelength_sum());
}

}  // namespace

double esf_mc(double x_camera_m, double edge_x0_m, const GeometryMC& g) {
  g.validate();
  return 0.5 * std::erfc(-(x_camera_m - g.magnification() * edge_x0_m) / blur_sigma_mc(g));
}

double blur_sigma_mc(const GeometryMC& g) {
  g.validate();
  return g.f_camera_m * g.lambda_signal_m / (std::sqrt(2.0) * kPi * g.pump.waist_m);
}

Resolution resolution_mc(double f_idler_m, double lambda_idler_m, const GaussianPumpModel& pump) {
  require_positive(f_idler_m, "f_I");
  require_positive(lambda_idler_m, "lambda_I");
  pump.validate();
  const double res = f_idler_m * lambda_idler_m / (std::sqrt(2.0) * kPi * pump.waist_m);
  return {res, 2.0 * std::sqrt(kLn2) * res};
}

Resolution resolution_mc(const GeometryMC& g) {
  g.validate();
  return resolution_mc(g.f_idler_m, g.lambda_idler_m, g.pump);
}

double idler_divergence(const CrystalModel& c) {
  c.validate();
  const double ns = c.n_signal, ni = c.n_idler;
  return c.lambda_idler_m *
         std::sqrt(2.78 * ns * ni /
                   (kPi * c.length_m * (ns * c.lambda_idler_m + ni * c.lambda_signal_m)));
}

double fov_mc(double f_idler_m, double theta_idler_rad) {
  require_positive(f_idler_m, "f_I");
  if (!(theta_idler_rad >= 0.0)) throw ValidationError("theta_I must be nonnegative");
  return 2.0 * f_idler_m * theta_idler_rad;
}

double modes_mc(const CrystalModel& c, const GaussianPumpModel& pump) {
  c.validate();
  pump.validate();
  return 5.0 * pump.waist_m * std::sqrt(c.n_signal / (c.length_m * c.wavelength_sum()));
}

double two_point_image(double d_m, const GeometryPC& g, double x_c, double y_c) {
  g.validate();
  if (!(d_m >= 0.0)) throw ValidationError("separation must be nonnegative");
  const double a = pc_strength(g);
  const double xs = x_c / g.m_signal, ys = y_c / g.m_signal, h = d_m / (2.0 * g.m_idler);
  return std::exp(-a * ys * ys) *
         (std::exp(-a * (xs - h) * (xs - h)) + std::exp(-a * (xs + h) * (xs + h)));
}

double beta_two_point(double d_m, const GeometryPC& g) {
  g.validate();
  const double dip = two_point_image(d_m, g, 0.0, 0.0);
  const double width = std::abs(g.m_signal) / std::sqrt(pc_strength(g));
  const double upper = std::abs(g.m_signal / g.m_idler) * d_m / 2.0 + 6.0 * width;
  auto neg = [&](double x) { return -two_point_image(d_m, g, x, 0.0); };
  const auto [xpk, negpk] = boost::math::tools::brent_find_minima(neg, 0.0, upper, 52);
  (void)xpk;
  const double peak = std::max(-negpk, dip);
  return dip / peak;
}

double d_min_root(const GeometryPC& g, double beta_max) {
  g.validate();
  if (!(beta_max > 0.0 && beta_max < 1.0)) throw ValidationError("beta_max must lie in (0, 1)");
  const double scale = pc_length_scale(g);
  auto f = [&](double d) { return beta_two_point(d, g) - beta_max; };
  double lo = 0.05 * scale, hi = 5.0 * scale;
  if (!(f(lo) > 0.0 && f(hi) < 0.0)) throw PreconditionError("d_min root not bracketed");
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, boost::math::tools::eps_tolerance<double>(48), iters);
  return 0.5 * (a + b);
}

double d_min(const GeometryPC& g, double beta_max) {
  g.validate();
  if (beta_max == 0.81) return 0.53 * pc_length_scale(g);
  return d_min_root(g, beta_max);
}

double resolution_pc_fwhm(const GeometryPC& g) {
  g.validate();
  return 0.44 * std::abs(g.m_idler) *
         std::sqrt(g.crystal.length_m * g.crystal.wavelength_sum() / g.crystal.n_signal);
}

double fov_pc(const GaussianPumpModel& pump, double m_idler) {
  pump.validate();
  require_positive(std::abs(m_idler), "M_I");
  return std::sqrt(2.0 * kLn2) * std::abs(m_idler) * pump.waist_m;
}

double modes_pc(const CrystalModel& c, const GaussianPumpModel& pump) {
  c.validate();
  pump.validate();
  return 2.7 * pump.waist_m * std::sqrt(c.n_signal / (c.length_m * c.wavelength_sum()));
}

double oct_axial_resolution(double lambda_idler_m, double delta_lambda_m) {
  require_positive(lambda_idler_m, "lambda_I");
  require_positive(delta_lambda_m, "delta_lambda");
  return 0.44 * lambda_idler_m * lambda_idler_m / delta_lambda_m;
}

double bandwidth_wavelength(double lambda_m, double delta_nu_hz) {
  require_positive(lambda_m, "lambda");
  require_positive(delta_nu_hz, "delta_nu");
  return lambda_m * lambda_m * delta_nu_hz / kSpeedOfLight;
}

namespace {

nlohmann::json crystal_json(const CrystalModel& c) {
  return {{"length_m", c.length_m},
          {"n_signal", c.n_signal},
          {"n_idler", c.n_idler},
          {"lambda_signal_m", c.lambda_signal_m},
          {"lambda_idler_m", c.lambda_idler_m}};
}

}  // namespace

DesignReport design_mc(const std::string& name, const McInputs& in) {
  const auto res = resolution_mc(in.f_idler_m, in.crystal.lambda_idler_m, in.pump);
  const double theta = idler_divergence(in.crystal);
  return {name,
          Configuration::MC,
          res.res_fwhm_m,
          fov_mc(in.f_idler_m, theta),
          modes_mc(in.crystal, in.pump),
          {{"f_idler_m", in.f_idler_m},
           {"pump_waist_m", in.pump.waist_m},
           {"crystal", crystal_json(in.crystal)},
           {"theta_idler_rad", theta}},
          nullptr};
}

DesignReport design_pc(const std::string& name, const PcInputs& in) {
  GeometryPC g{};
  g.m_signal = 1.0;
  g.m_idler = in.m_idler;
  g.crystal = in.crystal;
  return {name,
          Configuration::PC,
          resolution_pc_fwhm(g),
          fov_pc(in.pump, in.m_idler),
          modes_pc(in.crystal, in.pump),
          {{"m_idler", in.m_idler},
           {"pump_waist_m", in.pump.waist_m},
           {"crystal", crystal_json(in.crystal)},
           {"d_min_m", d_min(g)}},
          nullptr};
}

McInputs preset_fuenzalida() {
  return {75e-3, CrystalModel{2e-3, 1.4, 1.4, 810e-9, 1550e-9}, GaussianPumpModel{119e-6}};
}

McInputs preset_microscopy() {
  return {100e-3, CrystalModel{2e-3, 1.8, 1.8, 0.8e-6, 3.8e-6}, GaussianPumpModel{430e-6}};
}

PcInputs preset_position_correlation() {
  return {0.25, CrystalModel{2e-3, 1.8, 1.8, 0.8e-6, 3.8e-6}, GaussianPumpModel{430e-6}};
}

std::vector<DesignReport> comparison_report() {
  auto a = design_mc("momentum/fuenzalida", preset_fuenzalida());
  a.experiment = {{"res_fwhm_m", 366e-6}, {"fov_m", nullptr}, {"modes_per_direction", nullptr}};
  auto b = design_mc("momentum/microscopy", preset_microscopy());
  b.experiment = {{"res_fwhm_m", 320e-6}, {"fov_m", 9e-3}, {"modes_per_direction", 28}};
  auto c = design_pc("position/kviatkovsky", preset_position_correlation());
  c.experiment = {{"res_fwhm_m", 9e-6}, {"fov_m", 160e-6}, {"modes_per_direction", 18}};
  return {a, b, c};
}

nlohmann::json to_json(const DesignReport& r) {
  return {{"name", r.name},
          {"configuration", r.configuration == Configuration::MC ? "MC" : "PC"},
          {"res_fwhm_m", r.res_fwhm_m},
          {"fov_m", r.fov_m},
          {"modes_per_direction", r.modes_per_direction},
          {"inputs", r.inputs},
          {"experiment", r.experiment}};
}

nlohmann::json to_json(const std::vector<DesignReport>& rows) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& r : rows) cols.push_back(to_json(r));
  return {{"columns", cols},
          {"notes",
           {"d_min carries no refractive index while the PC res_fwhm formula divides by n; "
            "both are evaluated as written.",
            "Experimental values are reference metadata; computed values are theory."}}};
}

namespace {

std::string fmt_length(double m) {
  char buf[32];
  if (m >= 1e-3)
    std::snprintf(buf, sizeof buf, "%.2f mm", m * 1e3);
  else
    std::snprintf(buf, sizeof buf, "%.1f um", m * 1e6);
  return buf;
}

}  // namespace

std::string format_table(const std::vector<DesignReport>& rows) {
  std::string out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-10s", "");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, " | %-22s", r.name.c_str());
    out += buf;
  }
  out += "\n";
  auto line = [&](const char* label, auto cell) {
    std::snprintf(buf, sizeof buf, "%-10s", label);
    out += buf;
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof buf, " | %-22s", cell(r).c_str());
      out += buf;
    }
    out += "\n";
  };
  line("res_fwhm", [](const DesignReport& r) { return fmt_length(r.res_fwhm_m); });
  line("FoV", [](const DesignReport& r) { return fmt_length(r.fov_m); });
  line("m", [](const DesignReport& r) {
    char b[32];
    std::snprintf(b, sizeof b, "%.2f", r.modes_per_direction);
    return std::string(b);
  });
  out +=
      "\n* d_min = 0.53 M_I sqrt(L(lambda_I+lambda_s)) has no refractive index; the PC res_fwhm "
      "column divides by n.\n";
  return out;
}

}  // namespace qiup::design
