#include "oslalm/image_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace oslalm {

namespace {

std::uint32_t to_little(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void write_raw_f32(const std::filesystem::path& path, const DenseVector& values) {
  std::vector<std::uint32_t> buf(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::abs(values[i]) > static_cast<double>(std::numeric_limits<float>::max()))
      throw Error(ErrorCategory::domain, fmt::format("{}: value {} overflows float32", path.string(), values[i]));
    buf[i] = to_little(std::bit_cast<std::uint32_t>(static_cast<float>(values[i])));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCategory::io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 4));
  if (!out) throw Error(ErrorCategory::io, "write failed: " + path.string());
}

DenseVector read_raw_f32(const std::filesystem::path& path, std::size_t expected_count) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw Error(ErrorCategory::io, "cannot read " + path.string());
  const auto bytes = static_cast<std::size_t>(in.tellg());
  if (bytes != expected_count * 4)
    throw Error(ErrorCategory::data, fmt::format("{}: expected {} float32 samples, file holds {} bytes",
                                                 path.string(), expected_count, bytes));
  in.seekg(0);
  std::vector<std::uint32_t> buf(expected_count);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes));
  if (!in) throw Error(ErrorCategory::io, "read failed: " + path.string());
  std::vector<double> out(expected_count);
  for (std::size_t i = 0; i < expected_count; ++i) {
    const float f = std::bit_cast<float>(to_little(buf[i]));
    if (!std::isfinite(f)) throw Error(ErrorCategory::data, path.string() + ": non-finite sample");
    out[i] = f;
  }
  return DenseVector(std::move(out));
}

void write_sidecar(const std::filesystem::path& path, const Sidecar& entries) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::io, "cannot write " + path.string());
  for (const auto& [k, v] : entries) out << k << " = " << v << "\n";
  if (!out) throw Error(ErrorCategory::io, "write failed: " + path.string());
}

Sidecar read_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::io, "cannot read " + path.string());
  Sidecar s;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCategory::data, fmt::format("{}:{}: expected 'key = value'", path.string(), lineno));
    s[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return s;
}

double sidecar_number(const Sidecar& s, const std::string& key, const std::string& source) {
  const auto it = s.find(key);
  if (it == s.end()) throw Error(ErrorCategory::data, fmt::format("{}: missing key '{}'", source, key));
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(it->second, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != it->second.size())
    throw Error(ErrorCategory::data, fmt::format("{}: key '{}' is not a number", source, key));
  return v;
}

Sidecar image_sidecar(const ImageGrid& grid) {
  return {{"nx", std::to_string(grid.nx)},
          {"ny", std::to_string(grid.ny)},
          {"pixel_size", fmt::format("{}", grid.pixel_size)},
          {"roi_radius", fmt::format("{}", grid.roi_radius)}};
}

ImageGrid grid_from_sidecar(const Sidecar& s, const std::string& source) {
  ImageGrid g;
  g.nx = static_cast<std::size_t>(sidecar_number(s, "nx", source));
  g.ny = static_cast<std::size_t>(sidecar_number(s, "ny", source));
  g.pixel_size = sidecar_number(s, "pixel_size", source);
  g.roi_radius = sidecar_number(s, "roi_radius", source);
  g.validate();
  return g;
}

void export_pgm16(const std::filesystem::path& path, const DenseVector& image,
                  const ImageGrid& grid, double lo, double hi) {
  if (image.size() != grid.size()) throw_dimension("export_pgm16", grid.size(), image.size());
  if (!(hi > lo)) throw Error(ErrorCategory::domain, "export_pgm16: window needs hi > lo");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCategory::io, "cannot write " + path.string());
  out << "P5\n" << grid.nx << " " << grid.ny << "\n65535\n";
  std::vector<unsigned char> row(grid.nx * 2);
  for (std::size_t jj = 0; jj < grid.ny; ++jj) {
    const std::size_t j = grid.ny - 1 - jj;
    for (std::size_t i = 0; i < grid.nx; ++i) {
      const double t = std::clamp((image[j * grid.nx + i] - lo) / (hi - lo), 0.0, 1.0);
      const auto v = static_cast<std::uint16_t>(std::lround(t * 65535.0));
      row[2 * i] = static_cast<unsigned char>(v >> 8);  // PGM is big-endian
      row[2 * i + 1] = static_cast<unsigned char>(v & 0xff);
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw Error(ErrorCategory::io, "write failed: " + path.string());
}

}  // namespace oslalm
