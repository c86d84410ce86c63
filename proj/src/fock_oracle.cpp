#include "qiup/fock_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qiup/errors.hpp"
#include "qiup/interferometer.hpp"

namespace qiup::oracle {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNormDrift = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

Role role_of(const std::map<int, Role>& roles, ModeIndex m) {
  const auto it = roles.find(m.label);
  if (it == roles.end())
    throw ValidationError("undeclared mode " + std::to_string(m.label));
  return it->second;
}

void require_same_role(const std::map<int, Role>& roles, ModeIndex a, ModeIndex b) {
  if (a == b) throw ValidationError("two-mode element needs distinct modes");
  if (role_of(roles, a) != role_of(roles, b))
    throw ValidationError("two-mode element mixes signal and idler modes");
}

}  // namespace

ModeIndex Network::add_mode(Role role, std::string name) {
  const int label = roles_.empty() ? 0 : roles_.rbegin()->first + 1;
  roles_.emplace(label, role);
  names_.emplace(label, name.empty() ? "m" + std::to_string(label) : std::move(name));
  return ModeIndex{label};
}

Network& Network::add(NetworkElement element) {
  elements_.push_back(std::move(element));
  return *this;
}

const std::string& Network::name_of(ModeIndex m) const {
  const auto it = names_.find(m.label);
  if (it == names_.end()) throw ValidationError("undeclared mode " + std::to_string(m.label));
  return it->second;
}

Complex PairState::amplitude(ModeIndex signal, ModeIndex idler) const {
  const auto it = amps_.find({signal.label, idler.label});
  return it == amps_.end() ? Complex{} : it->second;
}

double PairState::norm_squared() const {
  double n = 0.0;
  for (const auto& [key, a] : amps_) n += std::norm(a);
  return n;
}

void PairState::add(ModeIndex signal, ModeIndex idler, Complex value) {
  amps_[{signal.label, idler.label}] += value;
}

void PairState::apply_two_mode(ModeIndex a, ModeIndex b, Complex u00, Complex u01, Complex u10,
                               Complex u11) {
  const bool on_signal = role_of(roles_, a) == Role::Signal;
  std::map<std::pair<int, int>, Complex> out;
  for (const auto& [key, v] : amps_) {
    const int slot = on_signal ? key.first : key.second;
    auto with_slot = [&](int label) {
      return on_signal ? std::pair{label, key.second} : std::pair{key.first, label};
    };
    if (slot == a.label) {
      out[with_slot(a.label)] += u00 * v;
      out[with_slot(b.label)] += u10 * v;
    } else if (slot == b.label) {
      out[with_slot(a.label)] += u01 * v;
      out[with_slot(b.label)] += u11 * v;
    } else {
      out[key] += v;
    }
  }
  amps_ = std::move(out);
}

void PairState::apply_phase(ModeIndex m, double phi) {
  const bool on_signal = role_of(roles_, m) == Role::Signal;
  const Complex f = std::polar(1.0, phi);
  for (auto& [key, v] : amps_)
    if ((on_signal ? key.first : key.second) == m.label) v *= f;
}

PairState build_state(const Network& network) {
  const auto& roles = network.roles();
  PairState state(roles);

  double weight_sum = 0.0;
  for (const auto& e : network.elements())
    if (const auto* s = std::get_if<Source>(&e)) weight_sum += std::norm(s->weight);
  if (weight_sum <= 0.0) throw ValidationError("network has no emitting source");
  if (weight_sum > 1.0 + kNormDrift)
    throw ValidationError("source weights sum |alpha_j|^2 exceeds 1");

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const Complex i{0.0, 1.0};

  for (const auto& element : network.elements()) {
    const double before = state.norm_squared();
    bool unitary = true;
    std::visit(
        Overloaded{
            [&](const Source& s) {
              if (role_of(roles, s.signal) != Role::Signal)
                throw ValidationError("source signal mode must have signal role");
              if (role_of(roles, s.idler) != Role::Idler)
                throw ValidationError("source idler mode must have idler role");
              state.add(s.signal, s.idler, s.weight);
              unitary = false;
            },
            [&](const BeamSplitter& bs) {
              require_same_role(roles, bs.a, bs.b);
              state.apply_two_mode(bs.a, bs.b, inv_sqrt2, i * inv_sqrt2, i * inv_sqrt2, inv_sqrt2);
            },
            [&](const Phase& p) {
              role_of(roles, p.mode);
              if (!std::isfinite(p.phi)) throw ValidationError("phase must be finite");
              state.apply_phase(p.mode, p.phi);
            },
            [&](const Object& o) {
              require_same_role(roles, o.mode, o.loss);
              const double mag = std::abs(o.t);
              if (!(mag <= 1.0 + kNormDrift))
                throw ValidationError("object transmittance magnitude exceeds 1");
              const Complex r = i * std::sqrt(std::max(0.0, 1.0 - mag * mag));
              state.apply_two_mode(o.mode, o.loss, o.t, r, r, std::conj(o.t));
            },
        },
        element);
    if (unitary && std::abs(state.norm_squared() - before) > kNormDrift)
      throw ValidationError("element failed to preserve the state norm");
  }
  return state;
}

double detector_rate(const PairState& state, ModeIndex signal_mode) {
  if (role_of(state.roles(), signal_mode) != Role::Signal)
    throw ValidationError("detector_rate expects a signal-role mode");
  double rate = 0.0;
  for (const auto& [key, a] : state.amplitudes())
    if (key.first == signal_mode.label) rate += std::norm(a);
  return rate;
}

double idler_detector_rate(const PairState& state, ModeIndex idler_mode) {
  if (role_of(state.roles(), idler_mode) != Role::Idler)
    throw ValidationError("idler_detector_rate expects an idler-role mode");
  double rate = 0.0;
  for (const auto& [key, a] : state.amplitudes())
    if (key.second == idler_mode.label) rate += std::norm(a);
  return rate;
}

double coincidence_rate(const PairState& state, ModeIndex signal_mode, ModeIndex idler_mode) {
  if (role_of(state.roles(), signal_mode) != Role::Signal ||
      role_of(state.roles(), idler_mode) != Role::Idler)
    throw ValidationError("coincidence_rate expects (signal, idler) modes");
  return std::norm(state.amplitude(signal_mode, idler_mode));
}

ZwmLayout zwm_layout(Complex t, double phi) {
  ZwmLayout l;
  l.s1 = l.network.add_mode(Role::Signal, "S1");
  l.s2 = l.network.add_mode(Role::Signal, "S2");
  l.idler = l.network.add_mode(Role::Idler, "I");
  l.loss = l.network.add_mode(Role::Idler, "0");
  const double w = 1.0 / std::sqrt(2.0);
  l.network.add(Source{l.s1, l.idler, w})
      .add(Object{l.idler, l.loss, t})
      .add(Source{l.s2, l.idler, std::polar(w, -phi)})
      .add(Phase{l.s2, -kPi / 2.0})
      .add(BeamSplitter{l.s1, l.s2});
  return l;
}

MzLayout mz_layout(Complex t, double phi) {
  MzLayout l;
  l.a = l.network.add_mode(Role::Signal, "A");
  l.b = l.network.add_mode(Role::Signal, "B");
  l.loss = l.network.add_mode(Role::Signal, "0");
  l.spectator = l.network.add_mode(Role::Idler, "spectator");
  l.network.add(Source{l.a, l.spectator, 1.0})
      .add(BeamSplitter{l.a, l.b})
      .add(Object{l.b, l.loss, t})
      .add(Phase{l.a, phi})
      .add(Phase{l.b, kPi})
      .add(BeamSplitter{l.a, l.b});
  return l;
}

Su11Layout su11_layout(Complex t, double phi) {
  Su11Layout l;
  l.signal = l.network.add_mode(Role::Signal, "S");
  l.idler = l.network.add_mode(Role::Idler, "I");
  l.loss = l.network.add_mode(Role::Idler, "0");
  l.network.add(Source{l.signal, l.idler, 0.5})
      .add(Object{l.idler, l.loss, t})
      .add(Phase{l.idler, phi})
      .add(Source{l.signal, l.idler, 0.5});
  return l;
}

TwoParticleLayout two_particle_layout(Complex t, double phi) {
  TwoParticleLayout l;
  l.s1 = l.network.add_mode(Role::Signal, "S1");
  l.s2 = l.network.add_mode(Role::Signal, "S2");
  l.i1 = l.network.add_mode(Role::Idler, "I1");
  l.i2 = l.network.add_mode(Role::Idler, "I2");
  l.loss = l.network.add_mode(Role::Idler, "0");
  const double w = 1.0 / std::sqrt(2.0);
  l.network.add(Source{l.s1, l.i1, w})
      .add(Object{l.i1, l.loss, t})
      .add(Phase{l.i1, phi})
      .add(Source{l.s2, l.i2, w})
      .add(BeamSplitter{l.s1, l.s2})
      .add(BeamSplitter{l.i1, l.i2});
  return l;
}

double EquivalenceReport::max_abs_delta() const {
  double m = 0.0;
  for (const auto& e : entries) m = std::max(m, e.max_abs_delta);
  return m;
}

EquivalenceReport run_equivalence(const EquivalenceOptions& opt) {
  namespace ifm = qiup::interferometer;
  if (opt.magnitude_points <= 0 || opt.phase_points <= 0 || opt.gamma_points <= 0)
    throw ValidationError("equivalence grid must have at least one point per axis");

  std::map<std::string, EquivalenceEntry> table;
  auto record = [&](const std::string& name, double closed, double oracle) {
    auto& e = table[name];
    e.quantity = name;
    e.max_abs_delta = std::max(e.max_abs_delta, std::abs(closed + opt.injected_bias - oracle));
    ++e.comparisons;
  };

  auto magnitude_at = [&](int k) {
    return opt.magnitude_points == 1 ? 1.0
                                     : static_cast<double>(k) / (opt.magnitude_points - 1);
  };

  // Scans sample phi + gamma on multiples of pi/8 so both extrema are hit exactly.
  constexpr int kScan = 16;

  for (int km = 0; km < opt.magnitude_points; ++km) {
    const double mag = magnitude_at(km);
    for (int kg = 0; kg < opt.gamma_points; ++kg) {
      const double gamma = 2.0 * kPi * kg / opt.gamma_points;
      const ifm::Transmittance t(mag, gamma);
      const Complex tc = t.value();

      for (int kp = 0; kp < opt.phase_points; ++kp) {
        const double phi = 2.0 * kPi * kp / opt.phase_points;
        const ifm::PhaseSetting ps(phi);

        const auto mz = mz_layout(tc, phi);
        const auto mz_state = build_state(mz.network);
        record("mz_rate_A", ifm::mz_count_rate(t, ps, ifm::MzPort::A),
               detector_rate(mz_state, mz.a));
        record("mz_rate_B", ifm::mz_count_rate(t, ps, ifm::MzPort::B),
               detector_rate(mz_state, mz.b));

        const auto zwm = zwm_layout(tc, phi);
        const auto zwm_state = build_state(zwm.network);
        record("zwm_rate_S1", ifm::zwm_count_rate(t, ps, ifm::ZwmPort::S1),
               detector_rate(zwm_state, zwm.s1));
        record("zwm_rate_S2", ifm::zwm_count_rate(t, ps, ifm::ZwmPort::S2),
               detector_rate(zwm_state, zwm.s2));

        const auto su = su11_layout(tc, phi);
        record("su11_rate_signal", ifm::su11_count_rate(t, ps),
               detector_rate(build_state(su.network), su.signal));

        const auto tp = two_particle_layout(tc, phi);
        const auto tp_state = build_state(tp.network);
        const auto closed = ifm::two_particle_rates(t, ps);
        record("two_particle_singles_S1", closed.singles, detector_rate(tp_state, tp.s1));
        record("two_particle_singles_S2", closed.singles, detector_rate(tp_state, tp.s2));
      }

      auto oracle_scan = [&](auto&& rate_at) {
        ifm::RateCurve curve;
        for (int k = 0; k < kScan; ++k) {
          const double phi = -gamma + 2.0 * kPi * k / kScan;
          curve.phases.push_back(phi);
          curve.rates.push_back(rate_at(phi));
        }
        return ifm::visibility_from_scan(curve);
      };
      record("zwm_visibility", mag, oracle_scan([&](double phi) {
               const auto l = zwm_layout(tc, phi);
               return detector_rate(build_state(l.network), l.s1);
             }));
      record("mz_visibility", ifm::mz_visibility(t), oracle_scan([&](double phi) {
               // MZ interference term depends on phi - gamma.
               const auto l = mz_layout(tc, phi + 2.0 * gamma);
               return detector_rate(build_state(l.network), l.a);
             }));
      record("two_particle_coincidence_visibility",
             ifm::two_particle_rates(t, ifm::PhaseSetting(0.0)).coincidence_visibility,
             oracle_scan([&](double phi) {
               const auto l = two_particle_layout(tc, phi);
               return coincidence_rate(build_state(l.network), l.s1, l.i1);
             }));
    }
  }

  EquivalenceReport report;
  for (auto& [name, e] : table) report.entries.push_back(e);
  return report;
}

}  // namespace qiup::oracle
