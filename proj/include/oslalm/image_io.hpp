#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "oslalm/ct_model.hpp"
#include "oslalm/linalg.hpp"

namespace oslalm {

// Raw arrays are little-endian IEEE-754 float32, no header, row-major with the
// fastest index last (pixel j*nx + i, sinogram view*n_bins + bin). Shapes and
// scalars live in a plain-text sidecar of "key = value" lines; '#' starts a
// comment.

/// Values are rounded to float32. Throws io on failure and domain when a value
/// does not fit in float32.
void write_raw_f32(const std::filesystem::path& path, const DenseVector& values);
/// Reads exactly expected_count samples; throws data when the file size differs.
DenseVector read_raw_f32(const std::filesystem::path& path, std::size_t expected_count);

using Sidecar = std::map<std::string, std::string>;

void write_sidecar(const std::filesystem::path& path, const Sidecar& entries);
Sidecar read_sidecar(const std::filesystem::path& path);

/// Looks up a key, throwing data with the file name when it is missing or not a number.
double sidecar_number(const Sidecar& s, const std::string& key, const std::string& source);

Sidecar image_sidecar(const ImageGrid& grid);
ImageGrid grid_from_sidecar(const Sidecar& s, const std::string& source);

/// 16-bit binary PGM of the image, mapping [lo, hi] linearly onto [0, 65535]
/// with values outside clipped. Row 0 of the file is the top (largest y) row.
void export_pgm16(const std::filesystem::path& path, const DenseVector& image,
                  const ImageGrid& grid, double lo, double hi);

}  // namespace oslalm
