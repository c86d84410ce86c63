#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "qiup/cli/config.hpp"

namespace qiup::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitPrecondition = 3;

/// Writes frames, truth maps and manifest.json into cfg.output_dir.
/// The directory is assembled next to the target and renamed into place.
void cmd_simulate(const RunConfig& cfg, bool overwrite, std::ostream& log);

enum class Method { Visibility, ImageFunction, PhaseStepping, OffAxis };
Method parse_method(const std::string& name);

/// Reads a simulate output directory and writes the reconstruction into
/// out_dir (default <frames_dir>/recon-<method>).
void cmd_reconstruct(const std::filesystem::path& frames_dir, Method method,
                     const std::filesystem::path& out_dir, int frame_index, std::ostream& log);

/// Lowercase hex SHA-256 of a file.
std::string sha256_file(const std::filesystem::path& path);

/// Entry point behind the qiup executable.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace qiup::cli
