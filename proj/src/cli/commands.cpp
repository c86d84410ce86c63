#include "qiup/cli/commands.hpp"

#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "qiup/design.hpp"
#include "qiup/errors.hpp"
#include "qiup/fock_oracle.hpp"
#include "qiup/image_io.hpp"
#include "qiup/metrology.hpp"
#include "qiup/objects.hpp"
#include "qiup/reconstruction.hpp"

namespace qiup::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string frame_stem(int j) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%03d", j);
  return buf;
}

// Sibling scratch directory that is renamed onto the target on success and
// removed otherwise.
class StagingDir {
 public:
  StagingDir(const fs::path& target, bool overwrite) : target_(fs::absolute(target)) {
    if (fs::exists(target_) && !overwrite && !fs::is_empty(target_))
      throw ValidationError("output directory " + target_.string() + " exists and is not empty");
    fs::create_directories(target_.parent_path());
    std::random_device rd;
    path_ = target_.parent_path() /
            ("." + target_.filename().string() + ".tmp-" + std::to_string(rd()));
    fs::create_directory(path_);
  }
  ~StagingDir() {
    std::error_code ec;
    if (!committed_) fs::remove_all(path_, ec);
  }
  StagingDir(const StagingDir&) = delete;
  StagingDir& operator=(const StagingDir&) = delete;

  const fs::path& path() const { return path_; }

  void commit() {
    if (fs::exists(target_)) fs::remove_all(target_);
    fs::rename(path_, target_);
    committed_ = true;
  }

 private:
  fs::path target_;
  fs::path path_;
  bool committed_ = false;
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

json geometry_json(const RunConfig& cfg, double magnification) {
  json g;
  if (cfg.mc) {
    const auto& m = *cfg.mc;
    g = {{"configuration", "MC"},
         {"f_idler_m", m.f_idler_m},
         {"f_camera_m", m.f_camera_m},
         {"lambda_signal_m", m.lambda_signal_m},
         {"lambda_idler_m", m.lambda_idler_m},
         {"pump_waist_m", m.pump.waist_m},
         {"carrier_rad_per_m", {m.carrier.x, m.carrier.y}},
         {"object_blur_std_m", m.object_blur_std()}};
  } else {
    const auto& p = *cfg.pc;
    g = {{"configuration", "PC"},
         {"m_signal", p.m_signal},
         {"m_idler", p.m_idler},
         {"crystal_length_m", p.crystal.length_m},
         {"lambda_signal_m", p.crystal.lambda_signal_m},
         {"lambda_idler_m", p.crystal.lambda_idler_m},
         {"carrier_rad_per_m", {p.carrier.x, p.carrier.y}},
         {"object_blur_std_m", p.object_blur_std()}};
  }
  g["magnification"] = magnification;
  return g;
}

// T(rho_c / M) sampled on the camera grid.
ComplexGrid truth_on_camera(const imaging::ObjectMap& obj, const RealGrid& camera, double magnification) {
  ComplexGrid t(camera.rows(), camera.cols(), camera.pitch());
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c)
      t(r, c) = obj.at({t.x(c) / magnification, t.y(r) / magnification});
  return t;
}

json file_entry(const fs::path& dir, const std::string& name) {
  return {{"file", name}, {"sha256", sha256_file(dir / name)}};
}

Vec2 carrier_from(const json& manifest) {
  const auto& k = manifest.at("geometry").at("carrier_rad_per_m");
  return {k.at(0).get<double>(), k.at(1).get<double>()};
}

double rms_difference(const RealGrid& a, const RealGrid& b, std::size_t guard) {
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t r = guard; r + guard < a.rows(); ++r)
    for (std::size_t c = guard; c + guard < a.cols(); ++c) {
      const double d = a(r, c) - b(r, c);
      acc += d * d;
      ++n;
    }
  return n ? std::sqrt(acc / static_cast<double>(n)) : 0.0;
}

}  // namespace

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 initialisation failed");
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

void cmd_simulate(const RunConfig& cfg, bool overwrite, std::ostream& log) {
  const auto obj = load_object(cfg.object);
  const bool mc = cfg.mc.has_value();
  const double magnification = mc ? cfg.mc->magnification() : cfg.pc->magnification();
  const auto field = mc ? (cfg.ideal ? imaging::interference_field_mc_ideal(obj, *cfg.mc, cfg.simulation)
                                     : imaging::interference_field_mc(obj, *cfg.mc, cfg.simulation))
                        : (cfg.ideal ? imaging::interference_field_pc_ideal(obj, *cfg.pc, cfg.simulation)
                                     : imaging::interference_field_pc(obj, *cfg.pc, cfg.simulation));
  auto frames = field.scan(cfg.frames, cfg.start_rad);
  if (cfg.mean_counts)
    for (std::size_t j = 0; j < frames.size(); ++j)
      frames[j] = imaging::add_shot_noise(frames[j], *cfg.mean_counts, cfg.seed + j);

  StagingDir stage(cfg.output_dir, overwrite);
  const auto& dir = stage.path();
  json frame_list = json::array();
  for (std::size_t j = 0; j < frames.size(); ++j) {
    const auto stem = frame_stem(static_cast<int>(j));
    io::write_csv(dir / (stem + ".csv"), frames[j].grid);
    io::write_pgm(dir / (stem + ".pgm"), frames[j].grid, imaging::kFrameScale);
    frame_list.push_back({{"index", j},
                          {"phase_tag_rad", frames[j].phase_tag},
                          {"csv", file_entry(dir, stem + ".csv")},
                          {"pgm", file_entry(dir, stem + ".pgm")}});
  }

  const auto truth = truth_on_camera(obj, frames.front().grid, magnification);
  io::write_csv(dir / "truth_magnitude.csv", io::magnitude_of(truth));
  io::write_csv(dir / "truth_phase.csv", io::phase_of(truth));

  json manifest{{"format", "qiup-frames/1"},
                {"geometry", geometry_json(cfg, magnification)},
                {"ideal", cfg.ideal},
                {"camera",
                 {{"rows", frames.front().grid.rows()},
                  {"cols", frames.front().grid.cols()},
                  {"pitch_m", frames.front().grid.pitch()}}},
                {"object", {{"rows", obj.rows()}, {"cols", obj.cols()}, {"pitch_m", obj.pitch()}}},
                {"scan", {{"frames", cfg.frames}, {"start_rad", cfg.start_rad}}},
                {"noise", cfg.mean_counts ? json{{"mean_counts", *cfg.mean_counts}, {"seed", cfg.seed}}
                                          : json(nullptr)},
                {"frame_scale", imaging::kFrameScale},
                {"frames", frame_list},
                {"truth",
                 {{"magnitude", file_entry(dir, "truth_magnitude.csv")},
                  {"phase", file_entry(dir, "truth_phase.csv")}}},
                {"config", cfg.echo}};
  write_json(dir / "manifest.json", manifest);
  stage.commit();
  log << "wrote " << frames.size() << " frames to " << cfg.output_dir.string() << "\n";
}

Method parse_method(const std::string& name) {
  if (name == "visibility") return Method::Visibility;
  if (name == "image-function") return Method::ImageFunction;
  if (name == "phase-stepping") return Method::PhaseStepping;
  if (name == "off-axis") return Method::OffAxis;
  throw ValidationError("unknown reconstruction method '" + name + "'");
}

namespace {

const char* method_name(Method m) {
  switch (m) {
    case Method::Visibility: return "visibility";
    case Method::ImageFunction: return "image-function";
    case Method::PhaseStepping: return "phase-stepping";
    case Method::OffAxis: return "off-axis";
  }
  return "";
}

RealGrid read_checked(const fs::path& dir, const json& entry) {
  const auto name = entry.at("file").get<std::string>();
  if (sha256_file(dir / name) != entry.at("sha256").get<std::string>())
    throw ValidationError("checksum mismatch for " + name);
  return io::read_csv(dir / name);
}

}  // namespace

void cmd_reconstruct(const fs::path& frames_dir, Method method, const fs::path& out_dir_in,
                     int frame_index, std::ostream& log) {
  const auto manifest_path = frames_dir / "manifest.json";
  if (!fs::exists(manifest_path)) throw ValidationError("no manifest.json in " + frames_dir.string());
  const auto manifest = read_json(manifest_path);

  std::vector<imaging::CameraFrame> frames;
  try {
    for (const auto& f : manifest.at("frames"))
      frames.push_back({read_checked(frames_dir, f.at("csv")), f.at("phase_tag_rad").get<double>()});
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed manifest: ") + e.what());
  }
  if (frames.empty() || frames.size() != manifest.at("scan").at("frames").get<std::size_t>())
    throw ValidationError("frame count does not match the manifest");
  for (const auto& f : frames)
    if (!f.grid.same_shape(frames.front().grid)) throw ValidationError("frames differ in shape");

  std::optional<ComplexGrid> truth;
  if (manifest.contains("truth")) {
    const auto mag = read_checked(frames_dir, manifest["truth"]["magnitude"]);
    const auto ph = read_checked(frames_dir, manifest["truth"]["phase"]);
    truth = ComplexGrid(mag.rows(), mag.cols(), mag.pitch());
    for (std::size_t i = 0; i < mag.size(); ++i) truth->values()[i] = std::polar(mag.values()[i], ph.values()[i]);
  }

  const fs::path out_dir =
      out_dir_in.empty() ? frames_dir / (std::string("recon-") + method_name(method)) : out_dir_in;
  StagingDir stage(out_dir, true);
  const auto& dir = stage.path();
  json summary{{"method", method_name(method)}, {"frames_used", frames.size()}};
  const std::size_t guard = 8;

  if (method == Method::Visibility || method == Method::ImageFunction) {
    const auto map = method == Method::Visibility ? reconstruction::visibility_map(frames)
                                                  : reconstruction::image_function(frames);
    const std::string name = method == Method::Visibility ? "visibility.csv" : "image_function.csv";
    io::write_csv(dir / name, map);
    summary["output"] = name;
    if (truth) {
      auto expected = io::magnitude_of(*truth);
      if (method == Method::ImageFunction)
        for (auto& v : expected.values()) v *= imaging::kFrameScale;
      summary["rms_vs_truth"] = rms_difference(map, expected, 0);
      summary["rms_vs_truth_guarded"] = rms_difference(map, expected, guard);
    }
  } else {
    const Vec2 carrier = carrier_from(manifest);
    ComplexGrid estimate;
    if (method == Method::PhaseStepping) {
      estimate = reconstruction::remove_carrier(reconstruction::phase_stepping_normalized(frames), carrier);
    } else {
      if (frame_index < 0 || frame_index >= static_cast<int>(frames.size()))
        throw ValidationError("frame index out of range");
      estimate = reconstruction::off_axis_holography(frames[frame_index], carrier);
      summary["frame_index"] = frame_index;
      summary["guard_band_px"] = guard;
    }
    io::write_csv(dir / "magnitude.csv", io::magnitude_of(estimate));
    io::write_csv(dir / "phase.csv", io::phase_of(estimate));
    summary["output"] = {"magnitude.csv", "phase.csv"};
    if (truth) {
      const std::size_t g = method == Method::OffAxis ? guard : 0;
      const auto cmp = reconstruction::phase_rms(estimate, *truth, g, 0.05);
      summary["phase_rms_vs_truth_rad"] = cmp.rms_rad;
      summary["phase_pixels_compared"] = cmp.pixels;
      summary["magnitude_rms_vs_truth"] =
          rms_difference(io::magnitude_of(estimate), io::magnitude_of(*truth), g);
    }
  }
  write_json(dir / "summary.json", summary);
  stage.commit();
  log << summary.dump(2) << "\n";
}

namespace {

struct Cli {
  CLI::App app{"Quantum imaging with undetected photons: simulation, reconstruction and design reports",
               "qiup"};
  // simulate
  std::string config_path;
  std::vector<std::string> overrides;
  bool overwrite = false;
  // reconstruct
  std::string frames_dir, method = "phase-stepping", recon_out;
  int frame_index = 0;
  // report
  std::string report_kind, format = "text", preset, report_out;
  double r_min = 0.0, r_max = 2.0;
  int r_steps = 21;
  std::vector<double> betas{0.0, 1.0, 3.0};
  // oracle-check
  std::vector<int> grid{10, 10, 4};
  double inject_bug = 0.0;
  // make-object
  std::string shape = "cat", object_out;
  std::size_t rows = 128, cols = 128;
  double pitch_m = 10e-6;
};

int report(const Cli& c, std::ostream& out) {
  if (c.report_kind == "table1" || c.report_kind == "design") {
    std::vector<design::DesignReport> rows;
    if (c.report_kind == "table1" || c.preset.empty()) {
      rows = design::comparison_report();
    } else if (c.preset == "fuenzalida") {
      rows.push_back(design::design_mc("momentum/fuenzalida", design::preset_fuenzalida()));
    } else if (c.preset == "microscopy") {
      rows.push_back(design::design_mc("momentum/microscopy", design::preset_microscopy()));
    } else if (c.preset == "position-correlation") {
      rows.push_back(design::design_pc("position/kviatkovsky", design::preset_position_correlation()));
    } else {
      throw ValidationError("unknown preset '" + c.preset + "'");
    }
    if (c.format == "json")
      out << design::to_json(rows).dump(2) << "\n";
    else
      out << design::format_table(rows);
    return kExitOk;
  }
  if (c.report_kind == "metrology") {
    if (c.r_steps < 2 || !(c.r_max > c.r_min) || c.r_min < 0.0)
      throw ValidationError("metrology sweep needs 0 <= r_min < r_max and at least 2 steps");
    std::vector<double> rs;
    for (int i = 0; i < c.r_steps; ++i) rs.push_back(c.r_min + (c.r_max - c.r_min) * i / (c.r_steps - 1));
    const auto rows = metrology::boosted_sweep(rs, c.betas);
    if (c.report_out.empty()) {
      metrology::write_sweep_csv(out, rows);
    } else {
      std::ofstream f(c.report_out, std::ios::binary);
      if (!f) throw ValidationError("cannot write " + c.report_out);
      metrology::write_sweep_csv(f, rows);
    }
    return kExitOk;
  }
  throw ValidationError("report kind must be table1, design or metrology");
}

int oracle_check(const Cli& c, std::ostream& out) {
  if (c.grid.size() != 3) throw ValidationError("--grid takes three counts: magnitudes,phases,gammas");
  oracle::EquivalenceOptions opt;
  opt.magnitude_points = c.grid[0];
  opt.phase_points = c.grid[1];
  opt.gamma_points = c.grid[2];
  opt.injected_bias = c.inject_bug;
  const auto rep = oracle::run_equivalence(opt);
  for (const auto& e : rep.entries) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-40s comparisons=%-6d max|delta|=%.3e\n", e.quantity.c_str(),
                  e.comparisons, e.max_abs_delta);
    out << buf;
  }
  const bool ok = rep.passed();
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s max|delta|=%.3e (tolerance 1e-12)\n", ok ? "PASS" : "FAIL",
                rep.max_abs_delta());
  out << buf;
  return ok ? kExitOk : kExitCheckFailed;
}

int make_object(const Cli& c, std::ostream& out) {
  const auto obj = objects::make_object(c.shape, c.rows, c.cols, c.pitch_m);
  StagingDir stage(c.object_out, false);
  io::write_csv(stage.path() / "magnitude.csv", io::magnitude_of(obj.transmittance()));
  io::write_csv(stage.path() / "phase.csv", io::phase_of(obj.transmittance()));
  stage.commit();
  out << "wrote " << c.shape << " object to " << c.object_out << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  Cli c;
  auto& app = c.app;
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "Synthesize a phase scan of camera frames");
  sim->add_option("config", c.config_path, "INI run configuration")->required();
  sim->add_option("--set", c.overrides, "Override a config key, section.key=value");
  sim->add_flag("--overwrite", c.overwrite, "Replace an existing output directory");

  auto* rec = app.add_subcommand("reconstruct", "Reconstruct an image from simulated frames");
  rec->add_option("frames", c.frames_dir, "Directory written by simulate")->required();
  rec->add_option("--method", c.method, "visibility | image-function | phase-stepping | off-axis");
  rec->add_option("--out", c.recon_out, "Output directory");
  rec->add_option("--frame", c.frame_index, "Frame used by the off-axis method");

  auto* rep = app.add_subcommand("report", "Design and metrology reports");
  rep->add_option("kind", c.report_kind, "table1 | design | metrology")->required();
  rep->add_option("--format", c.format, "text | json")->check(CLI::IsMember({"text", "json"}));
  rep->add_option("--preset", c.preset, "fuenzalida | microscopy | position-correlation");
  rep->add_option("--r-min", c.r_min);
  rep->add_option("--r-max", c.r_max);
  rep->add_option("--r-steps", c.r_steps);
  rep->add_option("--beta", c.betas, "Seed amplitudes for the metrology sweep");
  rep->add_option("--out", c.report_out, "Write the metrology CSV here instead of stdout");

  auto* orc = app.add_subcommand("oracle-check", "Compare closed forms with the Fock-space oracle");
  orc->add_option("--grid", c.grid, "Counts of |T|, phi and gamma samples")->delimiter(',');
  orc->add_option("--inject-bug", c.inject_bug)->group("");

  auto* mk = app.add_subcommand("make-object", "Write a synthetic object as magnitude/phase CSV");
  mk->add_option("--shape", c.shape)->check(CLI::IsMember(objects::shape_names()));
  mk->add_option("--rows", c.rows);
  mk->add_option("--cols", c.cols);
  mk->add_option("--pitch-m", c.pitch_m);
  mk->add_option("--out", c.object_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*sim) {
      cmd_simulate(load_config(c.config_path, c.overrides), c.overwrite, out);
      return kExitOk;
    }
    if (*rec) {
      cmd_reconstruct(c.frames_dir, parse_method(c.method), c.recon_out, c.frame_index, out);
      return kExitOk;
    }
    if (*rep) return report(c, out);
    if (*orc) return oracle_check(c, out);
    if (*mk) return make_object(c, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const PreconditionError& e) {
    err << "numerical precondition failed: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace qiup::cli
