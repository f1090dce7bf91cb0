#include "pat/io/array_file.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "pat/error.hpp"

namespace pat::io {
namespace {

constexpr char kMagic[8] = {'P', 'A', 'T', 'A', 'R', 'R', 'A', 'Y'};

template <class T>
void put(std::vector<unsigned char>& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(U); ++i)
    out.push_back(static_cast<unsigned char>((bits >> (8 * i)) & 0xffu));
}

template <class T>
T get(const std::vector<unsigned char>& in, std::size_t& pos) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  if (in.size() - pos < sizeof(U)) throw FormatError("array file: truncated");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(in[pos + i]) << (8 * i);
  pos += sizeof(U);
  return std::bit_cast<T>(bits);
}

std::uint32_t crc32_of(const unsigned char* data, std::size_t size) {
  uLong crc = crc32(0L, Z_NULL, 0);
  while (size > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(size, std::numeric_limits<uInt>::max()));
    crc = crc32(crc, data, chunk);
    data += chunk;
    size -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::uint64_t element_count(const std::vector<std::uint64_t>& dims) {
  std::uint64_t n = 1;
  for (std::uint64_t d : dims) {
    if (d != 0 && n > std::numeric_limits<std::uint64_t>::max() / d)
      throw FormatError("array file: dimension product overflows");
    n *= d;
  }
  return n;
}

}  // namespace

std::vector<unsigned char> encode_array(const ArrayData& array) {
  if (element_count(array.dims) != array.values.size())
    throw DomainError("encode_array: dims do not match value count");
  std::vector<unsigned char> out(std::begin(kMagic), std::end(kMagic));
  out.reserve(8 + 12 + 8 * array.dims.size() + 8 * array.values.size() + 4);
  put<std::uint32_t>(out, kArrayVersion);
  put<std::uint32_t>(out, kDtypeF64);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(array.dims.size()));
  for (std::uint64_t d : array.dims) put<std::uint64_t>(out, d);
  for (double v : array.values) put<double>(out, v);
  put<std::uint32_t>(out, crc32_of(out.data(), out.size()));
  return out;
}

ArrayData decode_array(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < 8 + 12 + 4 || std::memcmp(bytes.data(), kMagic, 8) != 0)
    throw FormatError("array file: bad magic");
  const std::size_t body = bytes.size() - 4;
  std::size_t tail = body;
  const auto stored_crc = get<std::uint32_t>(bytes, tail);
  if (stored_crc != crc32_of(bytes.data(), body)) throw FormatError("array file: CRC mismatch");

  std::size_t pos = 8;
  if (get<std::uint32_t>(bytes, pos) != kArrayVersion)
    throw FormatError("array file: unsupported version");
  if (get<std::uint32_t>(bytes, pos) != kDtypeF64) throw FormatError("array file: unsupported dtype");
  const auto rank = get<std::uint32_t>(bytes, pos);
  if (rank > (body - pos) / 8) throw FormatError("array file: truncated header");
  ArrayData a;
  a.dims.resize(rank);
  for (auto& d : a.dims) d = get<std::uint64_t>(bytes, pos);
  const std::uint64_t n = element_count(a.dims);
  if ((body - pos) / 8 != n || (body - pos) % 8 != 0)
    throw FormatError("array file: payload size does not match dims");
  a.values.resize(n);
  for (auto& v : a.values) v = get<double>(bytes, pos);
  return a;
}

void write_array(const std::filesystem::path& path, const ArrayData& array) {
  const auto bytes = encode_array(array);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DomainError("cannot open " + path.string() + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw DomainError("write failed: " + path.string());
}

void write_array(const std::filesystem::path& path, const Array2D& matrix) {
  ArrayData a{{matrix.rows(), matrix.cols()},
              std::vector<double>(matrix.flat().begin(), matrix.flat().end())};
  write_array(path, a);
}

ArrayData read_array(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DomainError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                   std::istreambuf_iterator<char>());
  return decode_array(bytes);
}

Array2D read_array2d(const std::filesystem::path& path) {
  const ArrayData a = read_array(path);
  if (a.dims.size() != 2) throw FormatError("array file: expected rank 2");
  Array2D m(a.dims[0], a.dims[1]);
  std::copy(a.values.begin(), a.values.end(), m.flat().begin());
  return m;
}

}  // namespace pat::io
