#include "pat/io/graymap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "pat/error.hpp"

namespace pat::io {

std::string encode_graymap(const Array2D& image) {
  std::string out = "P5\n" + std::to_string(image.cols()) + " " + std::to_string(image.rows()) +
                    "\n255\n";
  const auto v = image.flat();
  double lo = 0.0, hi = 0.0;
  if (!v.empty()) {
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    lo = *mn;
    hi = *mx;
  }
  const double span = hi - lo;
  out.reserve(out.size() + v.size());
  for (double x : v) {
    const double t = span > 0.0 ? (x - lo) / span : 0.0;
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t))));
  }
  return out;
}

void write_graymap(const std::filesystem::path& path, const Array2D& image) {
  const std::string bytes = encode_graymap(image);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DomainError("cannot open " + path.string() + " for writing");
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace pat::io
