#include "qiup/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qiup/errors.hpp"

namespace qiup::io {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kPitchKey = "pitch_m=";

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, const fs::path& path) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '"' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ValidationError("bad number '" + std::string(s) + "' in " + path.string());
  return v;
}

std::optional<double> pitch_from_comment(std::string_view line, const fs::path& path) {
  const auto pos = line.find(kPitchKey);
  if (pos == std::string_view::npos) return std::nullopt;
  return parse_double(line.substr(pos + kPitchKey.size()), path);
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

// Next whitespace-delimited header token of a PGM, skipping comments and
// harvesting the pitch.
std::string pgm_token(std::istream& in, std::optional<double>& pitch, const fs::path& path) {
  std::string tok;
  while (true) {
    int ch = in.peek();
    if (ch == EOF) throw ValidationError("truncated PGM header in " + path.string());
    if (std::isspace(ch)) {
      in.get();
      continue;
    }
    if (ch == '#') {
      std::string line;
      std::getline(in, line);
      if (auto p = pitch_from_comment(line, path)) pitch = p;
      continue;
    }
    break;
  }
  while (in.peek() != EOF && !std::isspace(in.peek())) tok.push_back(static_cast<char>(in.get()));
  return tok;
}

}  // namespace

void write_pgm(const fs::path& path, const RealGrid& grid, double full_scale) {
  if (!(full_scale > 0.0)) throw ValidationError("PGM full scale must be positive");
  auto out = open_out(path, std::ios::binary);
  out << "P5\n# " << kPitchKey << format_double(grid.pitch()) << "\n"
      << grid.cols() << " " << grid.rows() << "\n65535\n";
  std::vector<unsigned char> bytes;
  bytes.reserve(2 * grid.size());
  for (double v : grid.values()) {
    const double scaled = std::clamp(v / full_scale, 0.0, 1.0) * 65535.0;
    const auto q = static_cast<unsigned>(std::lround(scaled));
    bytes.push_back(static_cast<unsigned char>(q >> 8));
    bytes.push_back(static_cast<unsigned char>(q & 0xff));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ValidationError("failed writing " + path.string());
}

RealGrid read_pgm(const fs::path& path, double full_scale, std::optional<double> fallback_pitch) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::optional<double> pitch;
  if (pgm_token(in, pitch, path) != "P5") throw ValidationError(path.string() + " is not a binary PGM");
  const auto cols = std::stoul(pgm_token(in, pitch, path));
  const auto rows = std::stoul(pgm_token(in, pitch, path));
  const auto maxval = std::stoul(pgm_token(in, pitch, path));
  if (maxval == 0 || maxval > 65535) throw ValidationError("PGM maxval out of range in " + path.string());
  in.get();  // single whitespace before the raster
  if (!pitch) pitch = fallback_pitch;
  if (!pitch) throw ValidationError("PGM " + path.string() + " lacks a pitch_m comment");

  const std::size_t bpp = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> bytes(rows * cols * bpp);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
    throw ValidationError("truncated PGM raster in " + path.string());

  RealGrid g(rows, cols, *pitch);
  auto vals = g.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const unsigned q = bpp == 2 ? (bytes[2 * i] << 8) | bytes[2 * i + 1] : bytes[i];
    vals[i] = full_scale * static_cast<double>(q) / static_cast<double>(maxval);
  }
  return g;
}

void write_csv(const fs::path& path, const RealGrid& grid) {
  auto out = open_out(path, std::ios::binary);
  out << "# " << kPitchKey << format_double(grid.pitch()) << "\r\n";
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      if (c) out << ',';
      out << format_double(grid(r, c));
    }
    out << "\r\n";
  }
  if (!out) throw ValidationError("failed writing " + path.string());
}

RealGrid read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::optional<double> pitch;
  std::vector<double> values;
  std::size_t cols = 0, rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (auto p = pitch_from_comment(line, path)) pitch = p;
      continue;
    }
    std::size_t n = 0;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      values.push_back(parse_double(rest.substr(0, comma), path));
      ++n;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (rows == 0) cols = n;
    if (n != cols) throw ValidationError("ragged CSV rows in " + path.string());
    ++rows;
  }
  if (rows == 0) throw ValidationError("empty CSV grid " + path.string());
  if (!pitch) throw ValidationError("CSV " + path.string() + " lacks a pitch_m header");
  RealGrid g(rows, cols, *pitch);
  std::copy(values.begin(), values.end(), g.values().begin());
  return g;
}

imaging::ObjectMap load_object_csv(const fs::path& magnitude, const fs::path& phase) {
  const auto mag = read_csv(magnitude);
  const auto ph = read_csv(phase);
  if (std::abs(mag.pitch() - ph.pitch()) > 1e-12 * mag.pitch())
    throw ValidationError("magnitude and phase grids have different pitch");
  return imaging::ObjectMap::from_polar(mag, ph);
}

imaging::ObjectMap load_object_pgm(const fs::path& path, std::optional<double> fallback_pitch) {
  const auto mag = read_pgm(path, 1.0, fallback_pitch);
  return imaging::ObjectMap::from_polar(mag, RealGrid(mag.rows(), mag.cols(), mag.pitch()));
}

RealGrid magnitude_of(const ComplexGrid& g) {
  RealGrid out(g.rows(), g.cols(), g.pitch());
  for (std::size_t i = 0; i < g.size(); ++i) out.values()[i] = std::abs(g.values()[i]);
  return out;
}

RealGrid phase_of(const ComplexGrid& g) {
  RealGrid out(g.rows(), g.cols(), g.pitch());
  for (std::size_t i = 0; i < g.size(); ++i) out.values()[i] = std::arg(g.values()[i]);
  return out;
}

}  // namespace qiup::io
