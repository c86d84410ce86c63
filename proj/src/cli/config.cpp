#include "qiup/cli/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qiup/errors.hpp"
#include "qiup/image_io.hpp"
#include "qiup/objects.hpp"

namespace qiup::cli {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"mc",
       {"f_idler_m", "f_camera_m", "lambda_signal_m", "lambda_idler_m", "pump_waist_m",
        "phi_in_rad", "carrier_x_rad_per_m", "carrier_y_rad_per_m"}},
      {"pc",
       {"m_signal", "m_idler", "crystal_length_m", "n_signal", "n_idler", "lambda_signal_m",
        "lambda_idler_m", "phi_in_rad", "carrier_x_rad_per_m", "carrier_y_rad_per_m",
        "signal_phase_csv", "idler_phase_csv"}},
      {"object", {"source", "shape", "rows", "cols", "pitch_m", "magnitude_csv", "phase_csv", "pgm"}},
      {"scan", {"frames", "start_rad"}},
      {"noise", {"mean_counts", "seed"}},
      {"simulation",
       {"ideal", "quadrature", "hermite_nodes", "correlation", "separable_idler_std_m",
        "camera_rows", "camera_cols", "camera_pitch_m"}},
      {"output", {"dir"}},
  };
  return keys;
}

class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  bool present() const { return tree_ != nullptr; }

  template <typename T>
  std::optional<T> get(const std::string& key) const {
    if (!tree_) return std::nullopt;
    const auto raw = tree_->get_optional<std::string>(key);
    if (!raw) return std::nullopt;
    std::istringstream in(*raw);
    T v{};
    if constexpr (std::is_same_v<T, std::string>) {
      return *raw;
    } else if constexpr (std::is_same_v<T, bool>) {
      if (*raw == "true" || *raw == "1" || *raw == "yes") return true;
      if (*raw == "false" || *raw == "0" || *raw == "no") return false;
      fail(key, *raw);
    } else {
      in >> v;
      if (!in || !(in >> std::ws).eof()) fail(key, *raw);
    }
    return v;
  }

  template <typename T>
  T require(const std::string& key) const {
    auto v = get<T>(key);
    if (!v) throw ValidationError("[" + name_ + "] missing required key " + key);
    return *v;
  }

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& raw) const {
    throw ValidationError("[" + name_ + "] " + key + ": cannot parse '" + raw + "'");
  }

  const pt::ptree* tree_;
  std::string name_;
};

Section section(const pt::ptree& root, const std::string& name) {
  const auto child = root.get_child_optional(name);
  return {child ? &*child : nullptr, name};
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

void check_keys(const pt::ptree& root) {
  const auto& keys = known_keys();
  for (const auto& [sec, child] : root) {
    const auto it = keys.find(sec);
    if (it == keys.end()) throw ValidationError("unknown config section [" + sec + "]");
    for (const auto& [key, value] : child) {
      (void)value;
      if (!it->second.contains(key))
        throw ValidationError("unknown key '" + key + "' in [" + sec + "]");
    }
  }
}

RealGrid phase_map(const Section& s, const std::string& key, const fs::path& base) {
  return io::read_csv(resolve(base, s.require<std::string>(key)));
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides,
                       const fs::path& base_dir) {
  pt::ptree root;
  std::istringstream in(text);
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("config: ") + e.message() + " at line " +
                          std::to_string(e.line()));
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    const auto dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw ValidationError("override '" + o + "' must look like section.key=value");
    root.put(o.substr(0, eq), o.substr(eq + 1));
  }
  check_keys(root);

  RunConfig cfg;
  for (const auto& [sec, child] : root)
    for (const auto& [key, value] : child) cfg.echo[sec][key] = value.data();

  const auto mc = section(root, "mc");
  const auto pc = section(root, "pc");
  if (mc.present() == pc.present())
    throw ValidationError("config needs exactly one geometry section, [mc] or [pc]");

  if (mc.present()) {
    imaging::GeometryMC g{};
    g.f_idler_m = mc.require<double>("f_idler_m");
    g.f_camera_m = mc.require<double>("f_camera_m");
    g.lambda_signal_m = mc.require<double>("lambda_signal_m");
    g.lambda_idler_m = mc.require<double>("lambda_idler_m");
    g.pump.waist_m = mc.require<double>("pump_waist_m");
    g.phi_in = mc.get<double>("phi_in_rad").value_or(0.0);
    g.carrier = {mc.get<double>("carrier_x_rad_per_m").value_or(0.0),
                 mc.get<double>("carrier_y_rad_per_m").value_or(0.0)};
    g.validate();
    cfg.mc = g;
  } else {
    imaging::GeometryPC g{};
    g.m_signal = pc.require<double>("m_signal");
    g.m_idler = pc.require<double>("m_idler");
    g.crystal.length_m = pc.require<double>("crystal_length_m");
    g.crystal.n_signal = pc.get<double>("n_signal").value_or(1.0);
    g.crystal.n_idler = pc.get<double>("n_idler").value_or(g.crystal.n_signal);
    g.crystal.lambda_signal_m = pc.require<double>("lambda_signal_m");
    g.crystal.lambda_idler_m = pc.require<double>("lambda_idler_m");
    g.phi_in = pc.get<double>("phi_in_rad").value_or(0.0);
    g.carrier = {pc.get<double>("carrier_x_rad_per_m").value_or(0.0),
                 pc.get<double>("carrier_y_rad_per_m").value_or(0.0)};
    if (pc.get<std::string>("signal_phase_csv")) g.signal_phase_map = phase_map(pc, "signal_phase_csv", base_dir);
    if (pc.get<std::string>("idler_phase_csv")) g.idler_phase_map = phase_map(pc, "idler_phase_csv", base_dir);
    g.validate();
    cfg.pc = g;
  }

  const auto obj = section(root, "object");
  cfg.object.kind = obj.get<std::string>("source").value_or("builtin");
  if (cfg.object.kind == "builtin") {
    cfg.object.shape = obj.get<std::string>("shape").value_or("empty");
    cfg.object.rows = obj.get<std::size_t>("rows").value_or(128);
    cfg.object.cols = obj.get<std::size_t>("cols").value_or(cfg.object.rows);
    cfg.object.pitch_m = obj.require<double>("pitch_m");
  } else if (cfg.object.kind == "csv") {
    cfg.object.magnitude_csv = resolve(base_dir, obj.require<std::string>("magnitude_csv"));
    cfg.object.phase_csv = resolve(base_dir, obj.require<std::string>("phase_csv"));
  } else if (cfg.object.kind == "pgm") {
    cfg.object.pgm = resolve(base_dir, obj.require<std::string>("pgm"));
    cfg.object.pitch_m = obj.get<double>("pitch_m");
  } else {
    throw ValidationError("[object] source must be builtin, csv or pgm");
  }

  const auto scan = section(root, "scan");
  cfg.frames = scan.get<int>("frames").value_or(4);
  cfg.start_rad = scan.get<double>("start_rad").value_or(0.0);
  if (cfg.frames < 3) throw ValidationError("[scan] frames must be >= 3 (K >= 3 for phase stepping)");

  const auto noise = section(root, "noise");
  cfg.mean_counts = noise.get<double>("mean_counts");
  if (cfg.mean_counts && !(*cfg.mean_counts > 0.0))
    throw ValidationError("[noise] mean_counts must be positive");
  cfg.seed = noise.get<std::uint64_t>("seed").value_or(1);

  const auto sim = section(root, "simulation");
  cfg.ideal = sim.get<bool>("ideal").value_or(false);
  const auto quad = sim.get<std::string>("quadrature").value_or("pixel-exact");
  if (quad == "pixel-exact")
    cfg.simulation.quadrature = imaging::QuadratureRule::PixelExact;
  else if (quad == "gauss-hermite")
    cfg.simulation.quadrature = imaging::QuadratureRule::GaussHermite;
  else
    throw ValidationError("[simulation] quadrature must be pixel-exact or gauss-hermite");
  cfg.simulation.hermite_nodes = sim.get<int>("hermite_nodes").value_or(32);
  const auto corr = sim.get<std::string>("correlation").value_or("correlated");
  if (corr == "correlated")
    cfg.simulation.correlation = imaging::CorrelationModel::Correlated;
  else if (corr == "separable")
    cfg.simulation.correlation = imaging::CorrelationModel::Separable;
  else
    throw ValidationError("[simulation] correlation must be correlated or separable");
  cfg.simulation.separable_idler_std_m = sim.get<double>("separable_idler_std_m");
  const auto cam_rows = sim.get<std::size_t>("camera_rows");
  const auto cam_cols = sim.get<std::size_t>("camera_cols");
  const auto cam_pitch = sim.get<double>("camera_pitch_m");
  if (cam_rows || cam_cols || cam_pitch) {
    if (!(cam_rows && cam_cols && cam_pitch))
      throw ValidationError("[simulation] camera_rows, camera_cols and camera_pitch_m go together");
    cfg.simulation.camera = imaging::CameraSpec{*cam_rows, *cam_cols, *cam_pitch};
  }

  cfg.output_dir = resolve(base_dir, section(root, "output").get<std::string>("dir").value_or("qiup-out"));
  return cfg;
}

RunConfig load_config(const fs::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

imaging::ObjectMap load_object(const ObjectSource& src) {
  if (src.kind == "csv") return io::load_object_csv(src.magnitude_csv, src.phase_csv);
  if (src.kind == "pgm") return io::load_object_pgm(src.pgm, src.pitch_m);
  if (!src.pitch_m) throw ValidationError("[object] pitch_m is required for builtin shapes");
  return objects::make_object(src.shape, src.rows, src.cols, *src.pitch_m);
}

}  // namespace qiup::cli
