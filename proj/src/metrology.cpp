#include "qiup/metrology.hpp"

#include <cmath>
#include <charconv>
#include <limits>
#include <ostream>

#include "qiup/errors.hpp"

namespace qiup::metrology {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

constexpr Complex kI{0.0, 1.0};

// a' = U a + V a^dag + d on all modes.
struct Bogoliubov {
  MatrixXcd u, v;
  VectorXcd d;
  explicit Bogoliubov(int n)
      : u(MatrixXcd::Identity(n, n)), v(MatrixXcd::Zero(n, n)), d(VectorXcd::Zero(n)) {}
};

void check_mode(int mode, int n) {
  if (mode < 0 || mode >= n) throw ValidationError("network mode index out of range");
}

void check_pair(int i, int j, int n) {
  check_mode(i, n);
  check_mode(j, n);
  if (i == j) throw ValidationError("two-mode element needs distinct modes");
}

Bogoliubov element(const NetworkOp& op, int n) {
  Bogoliubov b(n);
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, BeamSplitter>) {
          check_pair(e.i, e.j, n);
          const double s = 1.0 / std::sqrt(2.0);
          b.u(e.i, e.i) = s;
          b.u(e.i, e.j) = kI * s;
          b.u(e.j, e.i) = kI * s;
          b.u(e.j, e.j) = s;
        } else if constexpr (std::is_same_v<T, Phase>) {
          check_mode(e.mode, n);
          b.u(e.mode, e.mode) = std::polar(1.0, e.phi);
        } else if constexpr (std::is_same_v<T, Squeeze>) {
          check_mode(e.mode, n);
          if (!(e.r >= 0.0)) throw ValidationError("squeezing parameter must be nonnegative");
          b.u(e.mode, e.mode) = std::cosh(e.r);
          b.v(e.mode, e.mode) = -std::polar(std::sinh(e.r), e.theta);
        } else if constexpr (std::is_same_v<T, TwoModeSqueeze>) {
          check_pair(e.i, e.j, n);
          if (!(e.r >= 0.0)) throw ValidationError("squeezing parameter must be nonnegative");
          const Complex sh = -std::polar(std::sinh(e.r), e.theta);
          b.u(e.i, e.i) = b.u(e.j, e.j) = std::cosh(e.r);
          b.v(e.i, e.j) = b.v(e.j, e.i) = sh;
        } else {
          check_mode(e.mode, n);
          b.d(e.mode) = e.alpha;
        }
      },
      op);
  return b;
}

std::vector<double> weights(const DetectionScheme& det, int n) {
  std::vector<double> w(n, 0.0);
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Intensity>) {
          check_mode(d.mode, n);
          w[d.mode] = 1.0;
        } else {
          check_pair(d.a, d.b, n);
          w[d.a] = 1.0;
          w[d.b] = std::is_same_v<T, IntensityDifference> ? -1.0 : 1.0;
        }
      },
      det);
  return w;
}

}  // namespace

MomentState::MomentState(VectorXcd mean, MatrixXcd n, MatrixXcd m)
    : mean_(std::move(mean)), n_(std::move(n)), m_(std::move(m)) {
  const auto k = mean_.size();
  if (k == 0 || n_.rows() != k || n_.cols() != k || m_.rows() != k || m_.cols() != k)
    throw ValidationError("moment matrices must match the number of modes");
}

MomentState MomentState::vacuum(int modes) {
  if (modes < 1) throw ValidationError("need at least one mode");
  return {VectorXcd::Zero(modes), MatrixXcd::Zero(modes, modes), MatrixXcd::Zero(modes, modes)};
}

MomentState MomentState::coherent(const std::vector<Complex>& alphas) {
  auto s = vacuum(static_cast<int>(alphas.size()));
  for (std::size_t i = 0; i < alphas.size(); ++i) s.mean_(static_cast<Eigen::Index>(i)) = alphas[i];
  return s;
}

double MomentState::photon_number(int mode) const {
  check_mode(mode, modes());
  return std::norm(mean_(mode)) + n_(mode, mode).real();
}

double MomentState::total_photon_number() const {
  double t = 0.0;
  for (int i = 0; i < modes(); ++i) t += photon_number(i);
  return t;
}

void MomentState::check_physical() const {
  const double scale = 1.0 + n_.cwiseAbs().maxCoeff() + m_.cwiseAbs().maxCoeff();
  const double tol = 1e-9 * scale;
  if ((n_ - n_.adjoint()).cwiseAbs().maxCoeff() > tol)
    throw ValidationError("number moments are not Hermitian");
  if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > tol)
    throw ValidationError("pair moments are not symmetric");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(n_);
  if (eig.eigenvalues().minCoeff() < -tol)
    throw ValidationError("number moments are not positive semidefinite");
  for (int i = 0; i < modes(); ++i) {
    const double ni = n_(i, i).real();
    if (std::norm(m_(i, i)) > ni * (ni + 1.0) + tol * scale)
      throw ValidationError("single-mode moments violate the uncertainty relation");
  }
}

MomentState propagate(const MomentState& state, const std::vector<NetworkOp>& ops) {
  state.check_physical();
  const int n = state.modes();
  const MatrixXcd id = MatrixXcd::Identity(n, n);
  VectorXcd mean = state.mean();
  MatrixXcd nm = state.number_moments();
  MatrixXcd pm = state.pair_moments();
  for (const auto& op : ops) {
    const auto b = element(op, n);
    const MatrixXcd uc = b.u.conjugate(), vc = b.v.conjugate();
    const MatrixXcd ut = b.u.transpose(), vt = b.v.transpose();
    const MatrixXcd nt1 = nm.transpose() + id;
    MatrixXcd n2 = uc * nm * ut + uc * pm.conjugate() * vt + vc * pm * ut + vc * nt1 * vt;
    MatrixXcd m2 = b.u * pm * ut + b.u * nt1 * vt + b.v * nm * ut + b.v * pm.conjugate() * vt;
    mean = b.u * mean + b.v * mean.conjugate() + b.d;
    nm = std::move(n2);
    pm = std::move(m2);
  }
  return {mean, nm, pm};
}

ObservableStats observable_stats(const MomentState& s, const DetectionScheme& det) {
  const int n = s.modes();
  const auto w = weights(det, n);
  const auto& a = s.mean();
  const auto& nm = s.number_moments();
  const auto& pm = s.pair_moments();
  double mean = 0.0, var = 0.0;
  for (int i = 0; i < n; ++i) {
    if (w[i] == 0.0) continue;
    mean += w[i] * s.photon_number(i);
    for (int j = 0; j < n; ++j) {
      if (w[j] == 0.0) continue;
      const double delta = i == j ? 1.0 : 0.0;
      const Complex ai = a(i), aj = a(j);
      const Complex cov = std::conj(ai) * std::conj(aj) * pm(i, j) +
                          std::conj(ai) * aj * (nm(j, i) + delta) + ai * std::conj(aj) * nm(i, j) +
                          ai * aj * std::conj(pm(i, j)) + std::norm(pm(i, j)) +
                          nm(i, j) * (nm(j, i) + delta);
      var += w[i] * w[j] * cov.real();
    }
  }
  return {mean, std::sqrt(std::max(var, 0.0))};
}

PhaseSensitivity min_phase(const NetworkBuilder& network, const MomentState& input,
                           const DetectionScheme& det, double phi0, const MinPhaseOptions& opt) {
  if (!(opt.step > 0.0)) throw ValidationError("derivative step must be positive");
  auto mean_at = [&](double phi) { return observable_stats(propagate(input, network(phi)), det).mean; };
  auto central = [&](double h) { return (mean_at(phi0 + h) - mean_at(phi0 - h)) / (2.0 * h); };
  const double slope = (4.0 * central(opt.step / 2.0) - central(opt.step)) / 3.0;
  const auto stats = observable_stats(propagate(input, network(phi0)), det);
  if (!(std::abs(slope) >= opt.slope_threshold * stats.stddev) || slope == 0.0)
    throw PreconditionError("vanishing slope of <M> at the working point");
  return {stats.stddev / std::abs(slope), slope, stats};
}

double shot_noise_limit(double n_bar) {
  if (!(n_bar > 0.0)) throw ValidationError("mean photon number must be positive");
  return 1.0 / std::sqrt(n_bar);
}

double heisenberg_limit(double n_bar) {
  if (!(n_bar > 0.0)) throw ValidationError("mean photon number must be positive");
  return 1.0 / n_bar;
}

double zwm_boosted_sensitivity(double r, double beta) {
  if (!(r >= 0.0)) throw ValidationError("gain r must be nonnegative");
  if (!std::isfinite(beta)) throw ValidationError("beta must be finite");
  return std::sqrt(std::exp(-2.0 * r) / (4.0 * (1.0 + beta * beta)));
}

std::vector<NetworkOp> mzi_network(double phi) {
  return {BeamSplitter{0, 1}, Phase{0, phi}, BeamSplitter{0, 1}};
}

std::vector<NetworkOp> zwm_network(double r, double beta, double phi) {
  return {Displace{0, beta}, TwoModeSqueeze{0, 2, r}, Phase{2, phi}, TwoModeSqueeze{1, 2, r},
          BeamSplitter{0, 1}};
}

std::vector<SweepRow> boosted_sweep(const std::vector<double>& rs, const std::vector<double>& betas) {
  std::vector<SweepRow> rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double b : betas)
    for (double r : rs) {
      const double n = b * b + std::sinh(r) * std::sinh(r);
      rows.push_back({r, b, zwm_boosted_sensitivity(r, b), n > 0.0 ? shot_noise_limit(n) : nan,
                      n > 0.0 ? heisenberg_limit(n) : nan});
    }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  auto cell = [&](double v) {
    if (std::isnan(v)) return;
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, res.ptr - buf);
  };
  out << "r,beta,delta_phi_min,shot_noise,heisenberg\r\n";
  for (const auto& row : rows) {
    cell(row.r);
    out << ',';
    cell(row.beta);
    out << ',';
    cell(row.delta_phi);
    out << ',';
    cell(row.shot_noise);
    out << ',';
    cell(row.heisenberg);
    out << "\r\n";
  }
}

}  // namespace qiup::metrology
