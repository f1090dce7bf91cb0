#pragma once

// Binary array container:
//   "PATARRAY"  8 bytes
//   version     u32 = 1
//   dtype       u32 = 1 (f64)
//   rank        u32
//   dims        rank x u64
//   payload     prod(dims) x f64, row-major
//   crc32       u32 over all preceding bytes
// All integers and floats little-endian.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pat/array2d.hpp"

namespace pat::io {

inline constexpr std::uint32_t kArrayVersion = 1;
inline constexpr std::uint32_t kDtypeF64 = 1;

struct ArrayData {
  std::vector<std::uint64_t> dims;
  std::vector<double> values;
};

std::vector<unsigned char> encode_array(const ArrayData& array);
/// Throws FormatError on bad magic, version, dtype, size or checksum.
ArrayData decode_array(const std::vector<unsigned char>& bytes);

void write_array(const std::filesystem::path& path, const ArrayData& array);
void write_array(const std::filesystem::path& path, const Array2D& matrix);
ArrayData read_array(const std::filesystem::path& path);
/// Requires rank 2.
Array2D read_array2d(const std::filesystem::path& path);

}  // namespace pat::io
