#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qiup/design.hpp"
#include "qiup/errors.hpp"

using namespace qiup;
using namespace qiup::design;
using doctest::Approx;

namespace {

GeometryMC mc(double waist = 119e-6) {
  GeometryMC g{};
  g.f_idler_m = 75e-3;
  g.f_camera_m = 100e-3;
  g.lambda_signal_m = 810e-9;
  g.lambda_idler_m = 1550e-9;
  g.pump.waist_m = waist;
  return g;
}

GeometryPC pc(double length = 2e-3, double m_idler = 1.0) {
  GeometryPC g{};
  g.m_signal = 1.0;
  g.m_idler = m_idler;
  g.crystal = {length, 1.0, 1.0, 810e-9, 1550e-9};
  return g;
}

}  // namespace

TEST_CASE("edge spread function") {
  const auto g = mc();
  const double s = blur_sigma_mc(g);
  CHECK(s == Approx(153.2e-6).epsilon(1e-3));
  CHECK(esf_mc(g.magnification() * 1e-4, 1e-4, g) == Approx(0.5));
  CHECK(esf_mc(1.0, 0.0, g) == Approx(1.0));
  CHECK(esf_mc(s / 2, 0.0, g) - esf_mc(-s / 2, 0.0, g) == Approx(0.52).epsilon(0.01));
  CHECK(blur_sigma_mc(mc(238e-6)) == Approx(s / 2));
  auto other = g;
  other.lambda_idler_m = 3e-6;
  CHECK(blur_sigma_mc(other) == Approx(s));
}

TEST_CASE("resolution and its identity with the blur") {
  const auto r = resolution_mc(mc());
  CHECK(r.res_m == Approx(220e-6).epsilon(0.01));
  CHECK(r.res_fwhm_m == Approx(366e-6).epsilon(0.002));
  CHECK(std::abs(blur_sigma_mc(mc()) / mc().magnification() - r.res_m) <= 1e-12 * r.res_m);
  CHECK(resolution_mc(100e-3, 3.8e-6, {430e-6}).res_fwhm_m == Approx(331e-6).epsilon(0.002));
}

TEST_CASE("divergence, field of view and mode counts") {
  const CrystalModel sven{2e-3, 1.8, 1.8, 0.8e-6, 3.8e-6};
  CHECK(idler_divergence(sven) == Approx(0.050).epsilon(0.01));
  auto longer = sven;
  longer.length_m = 8e-3;
  CHECK(idler_divergence(longer) == Approx(idler_divergence(sven) / 2));
  CHECK(fov_mc(100e-3, 0.05) == Approx(10e-3));
  CHECK(fov_mc(100e-3, 0.0) == 0.0);
  CHECK(modes_mc(sven, {430e-6}) == Approx(30.07).epsilon(1e-3));
  CHECK(modes_pc(sven, {430e-6}) == Approx(16.24).epsilon(1e-3));
  CHECK(modes_mc(sven, {430e-6}) / modes_pc(sven, {430e-6}) == Approx(5.0 / 2.7));
  CHECK(fov_pc({430e-6}, 0.25) == Approx(126.6e-6).epsilon(1e-3));
  CHECK(fov_pc({430e-6}, 1.0) == Approx(506.3e-6).epsilon(1e-3));
}

TEST_CASE("two-point resolution") {
  const auto g = pc();
  CHECK(beta_two_point(70e-6, g) == Approx(0.0767).epsilon(0.01));
  CHECK(beta_two_point(70e-6, pc(1e-6)) < 1e-6);
  CHECK(beta_two_point(1e-6, g) == Approx(1.0));
  CHECK(d_min(g) == Approx(0.53 * std::sqrt(2e-3 * 2.36e-6)));
  CHECK(d_min(g) == Approx(36.4e-6).epsilon(2e-3));
  CHECK(d_min(pc(2e-3, 2.0)) == Approx(2 * d_min(g)));
  CHECK(d_min_root(g) == Approx(d_min(g)).epsilon(0.02));
  CHECK(beta_two_point(d_min_root(g, 0.5), g) == Approx(0.5).epsilon(1e-9));
  CHECK_THROWS_AS(d_min(g, 1.0), ValidationError);
}

TEST_CASE("PC resolution and OCT") {
  GeometryPC g = pc(2e-3, 0.25);
  g.crystal = {2e-3, 1.8, 1.8, 0.8e-6, 3.8e-6};
  CHECK(resolution_pc_fwhm(g) == Approx(7.86e-6).epsilon(2e-3));
  g.crystal.length_m = 8e-3;
  CHECK(resolution_pc_fwhm(g) == Approx(2 * 7.86e-6).epsilon(2e-3));
  CHECK(oct_axial_resolution(1550e-9, 100e-9) == Approx(10.57e-6).epsilon(1e-3));
  const double dl = bandwidth_wavelength(1550e-9, 10e12);
  CHECK(oct_axial_resolution(1550e-9, dl) == Approx(13.2e-6).epsilon(1e-3));
  CHECK(oct_axial_resolution(1550e-9, 200e-9) == Approx(oct_axial_resolution(1550e-9, 100e-9) / 2));
  CHECK_THROWS_AS(oct_axial_resolution(1550e-9, 0.0), ValidationError);
}

TEST_CASE("comparison report") {
  const auto rows = comparison_report();
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].res_fwhm_m == Approx(366e-6).epsilon(2e-3));
  CHECK(rows[1].fov_m == Approx(10e-3).epsilon(0.01));
  CHECK(rows[2].modes_per_direction == Approx(16.2).epsilon(0.01));
  const auto j = to_json(rows);
  CHECK(j["columns"].size() == 3);
  CHECK(format_table(rows).find("res_fwhm") != std::string::npos);
}
