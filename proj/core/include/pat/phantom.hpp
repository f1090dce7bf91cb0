#pragma once

// Synthetic sources built from discs, annuli and ellipses; limited-view
// masking and reproducible Gaussian noise for sinograms.

#include <cstdint>
#include <span>
#include <vector>

#include "pat/geometry.hpp"

namespace pat {

enum class Shape { Disc, Annulus, Ellipse };

/// One shape indicator times amplitude. Radii in metres, rotation in radians.
///   Disc     radius = radius_a
///   Annulus  inner radius_a, outer radius_b
///   Ellipse  semi-axes radius_a (along rotated x) and radius_b
struct Primitive {
  Shape shape = Shape::Disc;
  Point2 center;
  double radius_a = 0.0;
  double radius_b = 0.0;
  double rotation = 0.0;
  double amplitude = 1.0;

  static Primitive disc(Point2 c, double r, double amp = 1.0);
  static Primitive annulus(Point2 c, double r_in, double r_out, double amp = 1.0);
  static Primitive ellipse(Point2 c, double a, double b, double rotation, double amp = 1.0);

  bool contains(double x, double y) const noexcept;
  /// Largest distance from the origin of any point of the shape (upper bound
  /// for ellipses).
  double extent() const noexcept;
};

struct PhantomSpec {
  std::vector<Primitive> primitives;
};

/// Throws ConfigError on non-finite or inconsistent parameters and on
/// primitives reaching beyond radius R.
void validate(const PhantomSpec& spec, double radius);

/// Each node value is the average of the summed indicators over the 2x2
/// sub-samples node +- dx/4.
SourceImage rasterize(const PhantomSpec& spec, const ScanGeometry& geometry);

/// Zeroes rows of detectors outside every arc. An empty arc list keeps all.
Sinogram apply_limited_view(const ScanGeometry& geometry, Sinogram g,
                            std::span<const DetectorArc> arcs);

struct NoisyData {
  Sinogram data;
  /// Euclidean norm of the added noise (unweighted).
  double delta = 0.0;
};

/// Adds i.i.d. Gaussian noise rescaled so that ||noise||_2 = level ||g||_2.
/// The stream is SplitMix64 keyed by (seed, sample index) with Box-Muller.
NoisyData add_noise(const Sinogram& g, double level, std::uint64_t seed);

/// As add_noise, but noise is drawn only on rows of active detectors so the
/// masked rows stay exactly zero and the level is met exactly.
NoisyData add_noise(const ScanGeometry& geometry, const Sinogram& g, double level,
                    std::uint64_t seed);

/// Standard normal variate number `index` of the stream `seed`.
double gaussian_variate(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace pat
