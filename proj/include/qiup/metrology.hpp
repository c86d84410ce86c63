#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace qiup::metrology {

using Complex = std::complex<double>;

/// Gaussian state of n bosonic modes: means alpha_i = <a_i>, and central
/// moments N_ij = <da_i^dag da_j>, M_ij = <da_i da_j>.
class MomentState {
 public:
  MomentState(Eigen::VectorXcd mean, Eigen::MatrixXcd n, Eigen::MatrixXcd m);

  static MomentState vacuum(int modes);
  static MomentState coherent(const std::vector<Complex>& alphas);

  int modes() const { return static_cast<int>(mean_.size()); }
  const Eigen::VectorXcd& mean() const { return mean_; }
  const Eigen::MatrixXcd& number_moments() const { return n_; }
  const Eigen::MatrixXcd& pair_moments() const { return m_; }

  /// <a_i^dag a_i>.
  double photon_number(int mode) const;
  double total_photon_number() const;

  /// Throws ValidationError if N is not Hermitian positive semidefinite or M
  /// not symmetric (tolerance scaled by the moment magnitudes).
  void check_physical() const;

 private:
  Eigen::VectorXcd mean_;
  Eigen::MatrixXcd n_;
  Eigen::MatrixXcd m_;
};

/// a_i -> (a_i + i a_j)/sqrt(2), a_j -> (i a_i + a_j)/sqrt(2).
struct BeamSplitter {
  int i, j;
};
/// a -> e^{i phi} a.
struct Phase {
  int mode;
  double phi;
};
/// a -> a cosh r - a^dag e^{i theta} sinh r.
struct Squeeze {
  int mode;
  double r;
  double theta = 0.0;
};
/// a_i -> a_i cosh r - e^{i theta} a_j^dag sinh r, and symmetrically for a_j.
struct TwoModeSqueeze {
  int i, j;
  double r;
  double theta = 0.0;
};
/// a -> a + alpha.
struct Displace {
  int mode;
  Complex alpha;
};

using NetworkOp = std::variant<BeamSplitter, Phase, Squeeze, TwoModeSqueeze, Displace>;

MomentState propagate(const MomentState& state, const std::vector<NetworkOp>& ops);

struct Intensity {
  int mode;
};
struct IntensityDifference {
  int a, b;  ///< measures n_a - n_b
};
struct IntensitySum {
  int a, b;
};
using DetectionScheme = std::variant<Intensity, IntensityDifference, IntensitySum>;

struct ObservableStats {
  double mean;
  double stddev;
};

/// Exact mean and standard deviation of a photon-number observable of a
/// Gaussian state (fourth moments by Isserlis factorization).
ObservableStats observable_stats(const MomentState& state, const DetectionScheme& det);

struct MinPhaseOptions {
  double step = 1e-5;
  double slope_threshold = 1e-9;  ///< relative to the observable's stddev
};

struct PhaseSensitivity {
  double delta_phi;
  double slope;
  ObservableStats stats;
};

using NetworkBuilder = std::function<std::vector<NetworkOp>(double phi)>;

/// Error-propagation sensitivity dM / |d<M>/dphi| at phi0, with a
/// Richardson-refined central difference. Throws PreconditionError when the
/// slope vanishes.
PhaseSensitivity min_phase(const NetworkBuilder& network, const MomentState& input,
                           const DetectionScheme& det, double phi0, const MinPhaseOptions& opt = {});

double shot_noise_limit(double n_bar);
double heisenberg_limit(double n_bar);
/// sqrt(e^{-2r} / (4 (1 + beta^2))).
double zwm_boosted_sensitivity(double r, double beta);

/// Coherent input alpha in mode 0, vacuum in mode 1: BS, Phase(0, phi), BS.
std::vector<NetworkOp> mzi_network(double phi);
/// Modes S1 = 0, S2 = 1, I = 2: seed beta in S1, TMS(S1, I), Phase(I, phi),
/// TMS(S2, I), BS(S1, S2). Detect n_S1 - n_S2.
std::vector<NetworkOp> zwm_network(double r, double beta, double phi);

struct SweepRow {
  double r;
  double beta;
  double delta_phi;
  double shot_noise;   ///< at n = beta^2 + sinh^2 r; NaN when n = 0
  double heisenberg;
};
std::vector<SweepRow> boosted_sweep(const std::vector<double>& rs, const std::vector<double>& betas);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace qiup::metrology
