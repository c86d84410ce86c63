#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qiup/errors.hpp"
#include "qiup/imaging.hpp"
#include "qiup/objects.hpp"

using namespace qiup;
using namespace qiup::imaging;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

GeometryMC mc_geometry(double waist = 119e-6) {
  GeometryMC g{};
  g.f_idler_m = 75e-3;
  g.f_camera_m = 100e-3;
  g.lambda_signal_m = 810e-9;
  g.lambda_idler_m = 1550e-9;
  g.pump.waist_m = waist;
  return g;
}

GeometryPC pc_geometry(double length = 2e-3) {
  GeometryPC g{};
  g.m_signal = 1.0;
  g.m_idler = 1.0;
  g.crystal = {length, 1.0, 1.0, 810e-9, 1550e-9};
  return g;
}

std::pair<double, double> range(const RealGrid& g) {
  const auto [lo, hi] = std::minmax_element(g.values().begin(), g.values().end());
  return {*lo, *hi};
}

double max_abs_diff(const RealGrid& a, const RealGrid& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

}  // namespace

TEST_CASE("object map validation") {
  CHECK_THROWS_AS(ObjectMap::uniform(4, 4, 1e-6, 1.1), ValidationError);
  CHECK_THROWS_AS(ObjectMap::uniform(0, 4, 1e-6, 1.0), ValidationError);
  const auto o = ObjectMap::uniform(4, 4, 1e-6, {0.0, 0.5});
  CHECK(std::abs(o.at({100.0, -100.0}) - Complex(0.0, 0.5)) == 0.0);
}

TEST_CASE("coordinate map") {
  const auto g = mc_geometry();
  const auto rho = map_coordinates_mc({2 * kPi * 1000, 0}, g, Target::Object);
  CHECK(rho.x == Approx(116.25e-6));
  CHECK(map_coordinates_mc({0, 0}, g, Target::Camera).x == 0.0);
  const auto cam = map_coordinates_mc({2 * kPi * 1000, 0}, g, Target::Camera);
  CHECK(cam.x / rho.x == Approx(g.magnification()));
}

TEST_CASE("trivial frames") {
  const auto g = mc_geometry();
  for (auto rule : {QuadratureRule::PixelExact, QuadratureRule::GaussHermite}) {
    SimulationOptions opt;
    opt.quadrature = rule;
    const auto empty = simulate_frame_mc(ObjectMap::uniform(32, 32, 20e-6, 1.0), g, opt);
    const auto [lo, hi] = range(empty.grid);
    CHECK(lo == Approx(2.0).epsilon(1e-12));
    CHECK(hi == Approx(2.0).epsilon(1e-12));
    const auto field = interference_field_mc(ObjectMap::uniform(32, 32, 20e-6, 0.0), g, opt);
    for (const auto& f : field.scan(8)) {
      const auto [a, b] = range(f.grid);
      CHECK(a == Approx(1.0).epsilon(1e-12));
      CHECK(b == Approx(1.0).epsilon(1e-12));
    }
  }
  const auto pc = simulate_frame_pc(ObjectMap::uniform(32, 32, 2e-6, 1.0), pc_geometry());
  CHECK(range(pc.grid).first == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("ideal frames follow 1 + |T| cos(phi - arg T)") {
  auto g = mc_geometry();
  g.phi_in = 0.4;
  const auto f = simulate_frame_mc_ideal(ObjectMap::uniform(8, 8, 10e-6, std::polar(1.0, kPi)), g);
  CHECK(f.grid(3, 3) == Approx(1 + std::cos(0.4 - kPi)));
  const auto field = interference_field_mc_ideal(ObjectMap::uniform(8, 8, 10e-6, 0.5), g);
  double lo = 10, hi = -10;
  for (const auto& fr : field.scan(64)) {
    lo = std::min(lo, fr.grid(2, 2));
    hi = std::max(hi, fr.grid(2, 2));
  }
  CHECK(lo == Approx(0.5));
  CHECK(hi == Approx(1.5));
}

TEST_CASE("frame pairs at phi and phi + pi sum to two") {
  const auto obj = objects::make_object("cat", 48, 48, 10e-6);
  const auto field = interference_field_mc_ideal(obj, mc_geometry());
  const auto a = field.frame(0.7), b = field.frame(0.7 + kPi);
  for (std::size_t i = 0; i < a.grid.size(); ++i)
    CHECK(std::abs(a.grid.values()[i] + b.grid.values()[i] - 2.0) <= 1e-12);
}

TEST_CASE("Gauss-Hermite agrees with pixel-exact on a smooth object") {
  const auto obj = objects::make_object("phase-bump", 64, 64, 5e-6);
  const auto g = mc_geometry();
  SimulationOptions gh;
  gh.quadrature = QuadratureRule::GaussHermite;
  const auto a = simulate_frame_mc(obj, g).grid;
  const auto b = simulate_frame_mc(obj, g, gh).grid;
  CHECK(max_abs_diff(a, b) < 2e-2);
}

TEST_CASE("Gauss-Hermite sampling precondition") {
  SimulationOptions gh;
  gh.quadrature = QuadratureRule::GaussHermite;
  const auto coarse = ObjectMap::uniform(16, 16, 200e-6, 1.0);
  CHECK_THROWS_AS(simulate_frame_mc(coarse, mc_geometry(), gh), PreconditionError);
  CHECK_NOTHROW(simulate_frame_mc(coarse, mc_geometry()));
}

TEST_CASE("delta-limit convergence") {
  const auto obj = objects::make_object("knife-edge", 64, 64, 10e-6);
  const auto ideal = simulate_frame_mc_ideal(obj, mc_geometry()).grid;
  double prev = 1e9;
  for (double w : {0.5e-3, 2e-3, 32e-3}) {
    const double err = max_abs_diff(simulate_frame_mc(obj, mc_geometry(w)).grid, ideal);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-3);

  const auto pc_ideal = simulate_frame_pc_ideal(obj, pc_geometry()).grid;
  prev = 1e9;
  for (double length : {2e-3, 0.2e-3, 0.02e-3}) {
    const double err = max_abs_diff(simulate_frame_pc(obj, pc_geometry(length)).grid, pc_ideal);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("separable density removes spatial information") {
  const auto obj = objects::make_object("cat", 40, 40, 10e-6);
  SimulationOptions opt;
  opt.correlation = CorrelationModel::Separable;
  const auto field = interference_field_mc(obj, mc_geometry(), opt);
  for (const auto& f : field.scan(8)) {
    const auto [lo, hi] = range(f.grid);
    CHECK(hi - lo <= 1e-9);
  }
}

TEST_CASE("PC phase maps and carrier enter the signal phase") {
  auto g = pc_geometry();
  const auto obj = ObjectMap::uniform(16, 16, 2e-6, 1.0);
  g.signal_phase_map = RealGrid(16, 16, 2e-6, 0.5);
  const auto f = simulate_frame_pc_ideal(obj, g);
  CHECK(f.grid(4, 4) == Approx(1 + std::cos(0.5)));
  g.signal_phase_map = RealGrid(8, 8, 2e-6, 0.5);
  CHECK_THROWS_AS(simulate_frame_pc_ideal(obj, g), ValidationError);
}

TEST_CASE("shot noise") {
  CameraFrame flat{RealGrid(100, 100, 1e-6, 1.0), 0.0};
  CHECK_THROWS_AS(add_shot_noise(flat, 0.0, 1), ValidationError);
  const auto a = add_shot_noise(flat, 1e4, 42);
  const auto b = add_shot_noise(flat, 1e4, 42);
  CHECK(std::equal(a.grid.values().begin(), a.grid.values().end(), b.grid.values().begin()));
  // counts have mean 5000 and variance 5000
  double mean = 0, var = 0;
  for (double v : a.grid.values()) mean += v * 5e3;
  mean /= 1e4;
  for (double v : a.grid.values()) var += (v * 5e3 - mean) * (v * 5e3 - mean);
  var /= 1e4 - 1;
  CHECK(mean == Approx(5e3).epsilon(0.01));
  CHECK(var == Approx(mean).epsilon(0.05));

  const auto big = add_shot_noise(flat, 1e6, 7);
  double rms = 0;
  for (double v : big.grid.values()) rms += (v - 1.0) * (v - 1.0);
  CHECK(std::sqrt(rms / 1e4) < 5e-3);
}
