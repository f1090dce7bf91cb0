#include "pat/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pat/error.hpp"

namespace pat {
namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform on (0, 1].
double unit_open(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

NoisyData add_noise_rows(const Sinogram& g, double level, std::uint64_t seed,
                         const std::vector<bool>& active) {
  if (!(level >= 0.0) || !std::isfinite(level)) throw ConfigError("noise level must be >= 0");
  NoisyData out{g, 0.0};
  const double gnorm = norm2(g.values.flat());
  if (level == 0.0 || gnorm == 0.0) return out;

  Array2D noise(g.values.rows(), g.values.cols());
  std::uint64_t index = 0;
  for (std::size_t k = 0; k < noise.rows(); ++k) {
    auto row = noise.row(k);
    for (double& v : row) {
      const double z = gaussian_variate(seed, index++);
      if (active[k]) v = z;
    }
  }
  const double nnorm = norm2(noise.flat());
  if (nnorm == 0.0) return out;
  const double scale = level * gnorm / nnorm;
  axpy(scale, noise.flat(), out.data.values.flat());
  out.delta = level * gnorm;
  return out;
}

}  // namespace

Primitive Primitive::disc(Point2 c, double r, double amp) {
  return {Shape::Disc, c, r, r, 0.0, amp};
}

Primitive Primitive::annulus(Point2 c, double r_in, double r_out, double amp) {
  return {Shape::Annulus, c, r_in, r_out, 0.0, amp};
}

Primitive Primitive::ellipse(Point2 c, double a, double b, double rotation, double amp) {
  return {Shape::Ellipse, c, a, b, rotation, amp};
}

bool Primitive::contains(double x, double y) const noexcept {
  const double dx = x - center.x;
  const double dy = y - center.y;
  switch (shape) {
    case Shape::Disc:
      return dx * dx + dy * dy <= radius_a * radius_a;
    case Shape::Annulus: {
      const double d2 = dx * dx + dy * dy;
      return d2 >= radius_a * radius_a && d2 <= radius_b * radius_b;
    }
    case Shape::Ellipse: {
      const double c = std::cos(rotation), s = std::sin(rotation);
      const double u = (c * dx + s * dy) / radius_a;
      const double v = (-s * dx + c * dy) / radius_b;
      return u * u + v * v <= 1.0;
    }
  }
  return false;
}

double Primitive::extent() const noexcept {
  const double c = std::hypot(center.x, center.y);
  switch (shape) {
    case Shape::Disc: return c + radius_a;
    case Shape::Annulus: return c + radius_b;
    case Shape::Ellipse: return c + std::max(radius_a, radius_b);
  }
  return c;
}

void validate(const PhantomSpec& spec, double radius) {
  for (std::size_t i = 0; i < spec.primitives.size(); ++i) {
    const Primitive& p = spec.primitives[i];
    const std::string where = "phantom primitive " + std::to_string(i) + ": ";
    const bool finite = std::isfinite(p.center.x) && std::isfinite(p.center.y) &&
                        std::isfinite(p.radius_a) && std::isfinite(p.radius_b) &&
                        std::isfinite(p.rotation) && std::isfinite(p.amplitude);
    if (!finite) throw ConfigError(where + "non-finite parameter");
    switch (p.shape) {
      case Shape::Disc:
        if (!(p.radius_a > 0.0)) throw ConfigError(where + "radius must be positive");
        break;
      case Shape::Annulus:
        if (!(p.radius_a >= 0.0 && p.radius_b > p.radius_a))
          throw ConfigError(where + "need 0 <= inner radius < outer radius");
        break;
      case Shape::Ellipse:
        if (!(p.radius_a > 0.0 && p.radius_b > 0.0))
          throw ConfigError(where + "semi-axes must be positive");
        break;
    }
    if (p.extent() > radius * (1.0 + 1e-12))
      throw ConfigError(where + "extends beyond the detection circle");
  }
}

SourceImage rasterize(const PhantomSpec& spec, const ScanGeometry& geometry) {
  validate(spec, geometry.radius());
  SourceImage out = SourceImage::zeros(geometry);
  if (spec.primitives.empty()) return out;
  const double q = 0.25 * geometry.dx();
  const std::size_t n = geometry.image_side();
  for (std::size_t i1 = 0; i1 < n; ++i1) {
    const double x = geometry.node(i1);
    for (std::size_t i2 = 0; i2 < n; ++i2) {
      const double y = geometry.node(i2);
      double acc = 0.0;
      for (const Primitive& p : spec.primitives) {
        int hits = 0;
        hits += p.contains(x - q, y - q);
        hits += p.contains(x - q, y + q);
        hits += p.contains(x + q, y - q);
        hits += p.contains(x + q, y + q);
        acc += p.amplitude * 0.25 * hits;
      }
      out.values(i1, i2) = acc;
    }
  }
  return out;
}

Sinogram apply_limited_view(const ScanGeometry& geometry, Sinogram g,
                            std::span<const DetectorArc> arcs) {
  require_sinogram_shape(geometry, g, "apply_limited_view");
  if (arcs.empty()) return g;
  for (std::size_t k = 0; k < geometry.nphi(); ++k) {
    const double phi = geometry.detector_angle(k);
    const bool keep = std::any_of(arcs.begin(), arcs.end(),
                                  [phi](const DetectorArc& a) { return a.contains(phi); });
    if (!keep) std::fill(g.values.row(k).begin(), g.values.row(k).end(), 0.0);
  }
  return g;
}

double gaussian_variate(std::uint64_t seed, std::uint64_t index) noexcept {
  const std::uint64_t pair = index >> 1;
  const std::uint64_t key = splitmix64(seed);
  const double u1 = unit_open(splitmix64(key ^ (2 * pair)));
  const double u2 = unit_open(splitmix64(key ^ (2 * pair + 1)));
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return (index & 1) ? r * std::sin(theta) : r * std::cos(theta);
}

NoisyData add_noise(const Sinogram& g, double level, std::uint64_t seed) {
  return add_noise_rows(g, level, seed, std::vector<bool>(g.values.rows(), true));
}

NoisyData add_noise(const ScanGeometry& geometry, const Sinogram& g, double level,
                    std::uint64_t seed) {
  require_sinogram_shape(geometry, g, "add_noise");
  std::vector<bool> active(geometry.nphi());
  for (std::size_t k = 0; k < active.size(); ++k) active[k] = geometry.detector_active(k);
  return add_noise_rows(g, level, seed, active);
}

}  // namespace pat
