#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qiup/imaging.hpp"

namespace qiup::cli {

struct ObjectSource {
  std::string kind = "builtin";  ///< builtin | csv | pgm
  std::string shape = "empty";
  std::size_t rows = 128;
  std::size_t cols = 128;
  std::optional<double> pitch_m;
  std::filesystem::path magnitude_csv;
  std::filesystem::path phase_csv;
  std::filesystem::path pgm;
};

/// One simulation run, read from an INI file with sections
/// [mc] or [pc], [object], [scan], [noise], [simulation], [output].
/// Every physical key carries its SI unit suffix (_m, _rad, _rad_per_m).
struct RunConfig {
  std::optional<imaging::GeometryMC> mc;
  std::optional<imaging::GeometryPC> pc;
  ObjectSource object;
  int frames = 4;
  double start_rad = 0.0;
  std::optional<double> mean_counts;
  std::uint64_t seed = 1;
  bool ideal = false;
  imaging::SimulationOptions simulation;
  std::filesystem::path output_dir = "qiup-out";
  /// Flattened section.key -> value map after overrides, echoed into manifests.
  nlohmann::json echo;
};

/// Parses and validates; `overrides` are "section.key=value" strings applied
/// on top of the file. Relative paths resolve against the file's directory.
RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides);
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides,
                       const std::filesystem::path& base_dir = ".");

imaging::ObjectMap load_object(const ObjectSource& src);

}  // namespace qiup::cli
