#pragma once

#include <filesystem>
#include <string>

#include "pat/array2d.hpp"

namespace pat::io {

/// Binary PGM (P5), 8 bit, rows top to bottom; values min-max normalized.
/// A constant image maps to 0.
std::string encode_graymap(const Array2D& image);
void write_graymap(const std::filesystem::path& path, const Array2D& image);

}  // namespace pat::io
