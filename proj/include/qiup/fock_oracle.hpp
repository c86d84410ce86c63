#pragma once

#include <complex>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qiup::oracle {

using Complex = std::complex<double>;

enum class Role { Signal, Idler };

/// Label of one optical mode. Loss ancillae are ordinary modes.
struct ModeIndex {
  int label = 0;
  friend auto operator<=>(const ModeIndex&, const ModeIndex&) = default;
};

/// Adds amplitude `weight` to the pair (signal, idler). Emission from several
/// sources adds coherently; at most one pair exists in total.
struct Source {
  ModeIndex signal;
  ModeIndex idler;
  Complex weight;
};

/// Lossless 50:50 splitter: |a> -> (|a> + i|b>)/sqrt2, |b> -> (|b> + i|a>)/sqrt2.
struct BeamSplitter {
  ModeIndex a;
  ModeIndex b;
};

/// Multiplies the amplitude of any excitation in `mode` by e^{i phi}.
struct Phase {
  ModeIndex mode;
  double phi;
};

/// Object as a beam splitter into a loss mode:
/// |m> -> T|m> + i sqrt(1-|T|^2)|loss>, |loss> -> i sqrt(1-|T|^2)|m> + T*|loss>.
struct Object {
  ModeIndex mode;
  ModeIndex loss;
  Complex t;
};

using NetworkElement = std::variant<Source, BeamSplitter, Phase, Object>;

/// Declared modes plus elements applied in order. The caller owns ordering;
/// no topological inference is performed.
class Network {
 public:
  ModeIndex add_mode(Role role, std::string name = {});
  Network& add(NetworkElement element);

  const std::map<int, Role>& roles() const { return roles_; }
  const std::vector<NetworkElement>& elements() const { return elements_; }
  const std::string& name_of(ModeIndex m) const;

 private:
  std::map<int, Role> roles_;
  std::map<int, std::string> names_;
  std::vector<NetworkElement> elements_;
};

/// Single-pair component of a low-gain two-source state. Keys are
/// (signal label, idler label). The squared norm is the pair-emission
/// probability; the vacuum carries the remainder.
class PairState {
 public:
  explicit PairState(std::map<int, Role> roles) : roles_(std::move(roles)) {}

  Complex amplitude(ModeIndex signal, ModeIndex idler) const;
  double norm_squared() const;
  const std::map<std::pair<int, int>, Complex>& amplitudes() const { return amps_; }
  const std::map<int, Role>& roles() const { return roles_; }

  void add(ModeIndex signal, ModeIndex idler, Complex value);
  /// Applies a 2x2 unitary (column-major action |a> -> u00|a> + u10|b>,
  /// |b> -> u01|a> + u11|b>) to modes a and b.
  void apply_two_mode(ModeIndex a, ModeIndex b, Complex u00, Complex u01, Complex u10,
                      Complex u11);
  void apply_phase(ModeIndex m, double phi);

 private:
  std::map<int, Role> roles_;
  std::map<std::pair<int, int>, Complex> amps_;
};

/// Applies the network. Throws ValidationError when an element references an
/// undeclared mode or mixes roles, when a unitary element fails to preserve
/// the norm to 1e-12, or when the summed source weights |alpha_j|^2 are zero
/// or exceed 1.
PairState build_state(const Network& network);

/// Singles rate at a signal detector with all idler-role modes traced out.
double detector_rate(const PairState& state, ModeIndex signal_mode);
/// Rate at an idler detector with all signal-role modes traced out.
double idler_detector_rate(const PairState& state, ModeIndex idler_mode);
/// |amplitude(signal, idler)|^2.
double coincidence_rate(const PairState& state, ModeIndex signal_mode, ModeIndex idler_mode);

/// Reference layouts of the four single-mode interferometers. Fixed Phase
/// elements absorb the quarter-wave offsets of the splitter convention so that
/// the tunable phase has the same zero as the closed forms.
struct ZwmLayout {
  Network network;
  ModeIndex s1, s2, idler, loss;
};
ZwmLayout zwm_layout(Complex t, double phi);

struct MzLayout {
  Network network;
  ModeIndex a, b, loss, spectator;
};
MzLayout mz_layout(Complex t, double phi);

struct Su11Layout {
  Network network;
  ModeIndex signal, idler, loss;
};
Su11Layout su11_layout(Complex t, double phi);

struct TwoParticleLayout {
  Network network;
  ModeIndex s1, s2, i1, i2, loss;
};
TwoParticleLayout two_particle_layout(Complex t, double phi);

struct EquivalenceOptions {
  int magnitude_points = 10;
  int phase_points = 10;
  int gamma_points = 4;
  /// Test hook: added to every closed-form value before comparison.
  double injected_bias = 0.0;
};

struct EquivalenceEntry {
  std::string quantity;
  double max_abs_delta = 0.0;
  int comparisons = 0;
};

struct EquivalenceReport {
  std::vector<EquivalenceEntry> entries;
  double max_abs_delta() const;
  bool passed(double tolerance = 1e-12) const { return max_abs_delta() <= tolerance; }
};

/// Compares every closed form of the interferometer module with the oracle on
/// a (|T|, phi, gamma) grid. Throws ValidationError for an empty grid.
EquivalenceReport run_equivalence(const EquivalenceOptions& options = {});

}  // namespace qiup::oracle
