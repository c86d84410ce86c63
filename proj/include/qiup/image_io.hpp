#pragma once

#include <filesystem>
#include <optional>

#include "qiup/grid.hpp"
#include "qiup/imaging.hpp"

namespace qiup::io {

/// Binary 16-bit graymap (P5, maxval 65535, big-endian) with a
/// "# pitch_m=<value>" comment. Values are mapped linearly from [0, full_scale]
/// and clipped.
void write_pgm(const std::filesystem::path& path, const RealGrid& grid, double full_scale = 2.0);

/// Reads a 16-bit or 8-bit P5 file, scaling maxval to full_scale. The pitch
/// comes from the comment line, or from fallback_pitch when absent.
RealGrid read_pgm(const std::filesystem::path& path, double full_scale = 1.0,
                  std::optional<double> fallback_pitch = std::nullopt);

/// Comma-separated grid, one image row per line, preceded by a
/// "# pitch_m=<value>" line. Numbers use shortest round-trip formatting.
void write_csv(const std::filesystem::path& path, const RealGrid& grid);
RealGrid read_csv(const std::filesystem::path& path);

/// Object from magnitude and phase CSV grids of identical shape.
imaging::ObjectMap load_object_csv(const std::filesystem::path& magnitude,
                                   const std::filesystem::path& phase);
/// Magnitude-only object from a graymap (white = fully transmitting).
imaging::ObjectMap load_object_pgm(const std::filesystem::path& path,
                                   std::optional<double> fallback_pitch = std::nullopt);

RealGrid magnitude_of(const ComplexGrid& g);
RealGrid phase_of(const ComplexGrid& g);

}  // namespace qiup::io
