#pragma once

// Discretization of the circular scanning geometry: image grid on
// [-R, R]^2, detectors on the circle of radius R, and the time axis [0, T].

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pat/array2d.hpp"

namespace pat {

/// Uniform time axis t_l = l * T / N_t, l = 0..N_t.
class TemporalGrid {
 public:
  TemporalGrid(std::size_t intervals, double final_time);

  std::size_t intervals() const noexcept { return intervals_; }
  std::size_t samples() const noexcept { return intervals_ + 1; }
  double final_time() const noexcept { return final_time_; }
  double step() const noexcept { return final_time_ / static_cast<double>(intervals_); }
  double time(std::size_t l) const noexcept { return static_cast<double>(l) * step(); }

  friend bool operator==(const TemporalGrid&, const TemporalGrid&) = default;

 private:
  std::size_t intervals_;
  double final_time_;
};

/// Closed angular interval [lo, hi] of active detectors, radians.
struct DetectorArc {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double phi) const noexcept;
  friend bool operator==(const DetectorArc&, const DetectorArc&) = default;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct GeometryParams {
  double radius = 0.05;          // R, m
  double sound_speed = 1540.0;   // c0, m/s
  std::size_t nx = 128;          // N_x
  std::size_t nt = 128;          // N_t
  std::size_t nphi = 128;        // N_phi
  std::optional<double> final_time;  // T, s; defaults to 2R/c0
  /// Active detector arcs; empty means the full circle.
  std::vector<DetectorArc> arcs;
};

class ScanGeometry {
 public:
  /// Throws ConfigError when R, c0, T or the grid counts are invalid or
  /// T < 2R/c0.
  explicit ScanGeometry(GeometryParams params);

  static ScanGeometry square(double radius, double sound_speed, std::size_t n,
                             std::vector<DetectorArc> arcs = {});

  const GeometryParams& params() const noexcept { return p_; }
  double radius() const noexcept { return p_.radius; }
  double sound_speed() const noexcept { return p_.sound_speed; }
  std::size_t nx() const noexcept { return p_.nx; }
  std::size_t nt() const noexcept { return p_.nt; }
  std::size_t nphi() const noexcept { return p_.nphi; }
  double final_time() const noexcept { return final_time_; }

  std::size_t image_side() const noexcept { return p_.nx + 1; }
  std::size_t time_samples() const noexcept { return p_.nt + 1; }

  double dx() const noexcept { return 2.0 * p_.radius / static_cast<double>(p_.nx); }
  double dt() const noexcept { return final_time_ / static_cast<double>(p_.nt); }
  double dphi() const noexcept;
  /// Radial step c0 * dt of the rescaled time axis.
  double dr() const noexcept { return p_.sound_speed * dt(); }

  TemporalGrid temporal_grid() const { return TemporalGrid(p_.nt, final_time_); }

  /// Image node coordinate along one axis: -R + i * dx.
  double node(std::size_t i) const noexcept { return -p_.radius + static_cast<double>(i) * dx(); }
  double detector_angle(std::size_t k) const noexcept;
  Point2 detector(std::size_t k) const noexcept;
  bool detector_active(std::size_t k) const noexcept;
  std::size_t active_detectors() const noexcept;
  bool full_view() const noexcept { return p_.arcs.empty(); }

  /// Weights of the discrete inner products.
  double image_weight() const noexcept { return dx() * dx(); }
  double data_weight() const noexcept { return p_.radius * dphi() * dt(); }

  /// Non-empty when dx, c0 dt and R dphi differ by more than 25 %.
  std::optional<std::string> sampling_warning() const;

  /// Same geometry with N_t scaled by `factor` (used for oversampled data).
  ScanGeometry with_time_oversampling(std::size_t factor) const;
  ScanGeometry with_arcs(std::vector<DetectorArc> arcs) const;

 private:
  GeometryParams p_;
  double final_time_;
};

/// Source samples h[i1, i2] ~ h(x_i), (N_x + 1)^2 nodes; i1 indexes x.
struct SourceImage {
  Array2D values;

  SourceImage() = default;
  explicit SourceImage(Array2D v) : values(std::move(v)) {}
  static SourceImage zeros(const ScanGeometry& g) {
    return SourceImage(Array2D(g.image_side(), g.image_side()));
  }
  friend bool operator==(const SourceImage&, const SourceImage&) = default;
};

/// Pressure data g[k, l] ~ g(y_k, t_l), N_phi x (N_t + 1).
struct Sinogram {
  Array2D values;

  Sinogram() = default;
  explicit Sinogram(Array2D v) : values(std::move(v)) {}
  static Sinogram zeros(const ScanGeometry& g) {
    return Sinogram(Array2D(g.nphi(), g.time_samples()));
  }
  friend bool operator==(const Sinogram&, const Sinogram&) = default;
};

void require_image_shape(const ScanGeometry& g, const SourceImage& h, const char* where);
void require_sinogram_shape(const ScanGeometry& g, const Sinogram& s, const char* where);

/// Weighted norms matching the discrete inner products.
double image_norm(const ScanGeometry& g, const SourceImage& h);
double data_norm(const ScanGeometry& g, const Sinogram& s);

}  // namespace pat
