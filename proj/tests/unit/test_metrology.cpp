#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "qiup/errors.hpp"
#include "qiup/metrology.hpp"

using namespace qiup;
using namespace qiup::metrology;
using doctest::Approx;

constexpr double kPi = std::numbers::pi;

TEST_CASE("passive elements") {
  const auto vac = propagate(MomentState::vacuum(2), mzi_network(0.3));
  CHECK(vac.total_photon_number() == Approx(0.0));
  const auto s = propagate(MomentState::coherent({2.0, 0.0}), {BeamSplitter{0, 1}});
  CHECK(std::abs(s.mean()(0) - Complex(std::sqrt(2.0), 0)) < 1e-14);
  CHECK(std::abs(s.mean()(1) - Complex(0, std::sqrt(2.0))) < 1e-14);
  const auto many = propagate(MomentState::coherent({1.0, {0.0, 2.0}}),
                              {BeamSplitter{0, 1}, Phase{1, 0.4}, BeamSplitter{1, 0}, Phase{0, 2.0}});
  CHECK(std::abs(many.total_photon_number() - 5.0) <= 1e-12);
}

TEST_CASE("squeezing") {
  const double r = 0.8;
  const auto sq = propagate(MomentState::vacuum(1), {Squeeze{0, r, 0.3}});
  CHECK(sq.photon_number(0) == Approx(std::sinh(r) * std::sinh(r)));
  const auto back = propagate(sq, {Squeeze{0, r, 0.3 + kPi}});
  CHECK(back.number_moments().cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(back.pair_moments().cwiseAbs().maxCoeff() <= 1e-12);
  const auto tms = propagate(MomentState::vacuum(2), {TwoModeSqueeze{0, 1, r}});
  const auto diff = observable_stats(tms, IntensityDifference{0, 1});
  CHECK(diff.mean == Approx(0.0));
  CHECK(diff.stddev == Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(propagate(MomentState::vacuum(1), {Squeeze{0, -0.1}}), ValidationError);
}

TEST_CASE("photon statistics") {
  const auto coh = MomentState::coherent({3.0});
  const auto st = observable_stats(coh, Intensity{0});
  CHECK(st.mean == Approx(9.0));
  CHECK(st.stddev == Approx(3.0));
  const auto vac = observable_stats(MomentState::vacuum(1), Intensity{0});
  CHECK(vac.mean == 0.0);
  CHECK(vac.stddev == 0.0);
  const auto split = propagate(MomentState::coherent({2.0, 0.0}), {BeamSplitter{0, 1}});
  CHECK(observable_stats(split, IntensityDifference{0, 1}).mean == Approx(0.0));
  const auto sq = propagate(MomentState::vacuum(1), {Squeeze{0, 0.5}});
  const double s2 = std::sinh(0.5) * std::sinh(0.5), c2 = std::cosh(0.5) * std::cosh(0.5);
  CHECK(observable_stats(sq, Intensity{0}).stddev == Approx(std::sqrt(2 * s2 * c2)));
}

TEST_CASE("unphysical input is rejected") {
  Eigen::MatrixXcd n(1, 1);
  n(0, 0) = -0.5;
  const MomentState bad(Eigen::VectorXcd::Zero(1), n, Eigen::MatrixXcd::Zero(1, 1));
  CHECK_THROWS_AS(propagate(bad, {}), ValidationError);
}

TEST_CASE("coherent MZI reaches the shot-noise limit") {
  for (double nbar : {1.0, 1e2, 1e4}) {
    const auto in = MomentState::coherent({std::sqrt(nbar), 0.0});
    const auto res = min_phase(mzi_network, in, IntensityDifference{1, 0}, kPi / 2);
    CHECK(std::abs(res.delta_phi / shot_noise_limit(nbar) - 1.0) < 1e-6);
    CHECK(std::abs(res.slope) == Approx(nbar).epsilon(1e-8));
  }
  const auto in = MomentState::coherent({1.0, 0.0});
  CHECK_THROWS_AS(min_phase(mzi_network, in, IntensityDifference{1, 0}, 0.0), PreconditionError);
}

TEST_CASE("ZWM Gaussian network at low gain sits above shot noise") {
  const double r = 0.05;
  auto net = [&](double phi) { return zwm_network(r, 0.0, phi); };
  const auto res = min_phase(net, MomentState::vacuum(3), IntensityDifference{0, 1}, 0.3);
  const double nbar = 2 * std::sinh(r) * std::sinh(r);
  CHECK(res.delta_phi > shot_noise_limit(nbar));
}

TEST_CASE("closed-form limits") {
  CHECK(shot_noise_limit(100) == Approx(0.1));
  CHECK(heisenberg_limit(100) == Approx(0.01));
  CHECK(heisenberg_limit(7.0) / shot_noise_limit(7.0) == Approx(1 / std::sqrt(7.0)));
  CHECK_THROWS_AS(shot_noise_limit(0.0), ValidationError);
  CHECK(zwm_boosted_sensitivity(0, 0) == 0.5);
  CHECK(zwm_boosted_sensitivity(1, 0) == Approx(std::exp(-1.0) / 2));
  CHECK(zwm_boosted_sensitivity(0, 2) < zwm_boosted_sensitivity(0, 1));
  CHECK_THROWS_AS(zwm_boosted_sensitivity(-0.1, 0), ValidationError);
}

TEST_CASE("sweep CSV") {
  const auto rows = boosted_sweep({0.0, 1.0, 2.0}, {0.0});
  std::ostringstream out;
  write_sweep_csv(out, rows);
  const auto text = out.str();
  CHECK(text.rfind("r,beta,delta_phi_min,shot_noise,heisenberg\r\n", 0) == 0);
  CHECK(text.find("0,0,0.5,,\r\n") != std::string::npos);
  CHECK(rows[1].delta_phi < rows[0].delta_phi);
}
