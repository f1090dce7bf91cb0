#include "pat/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pat/error.hpp"

namespace pat {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAngleTol = 1e-12;

}  // namespace

TemporalGrid::TemporalGrid(std::size_t intervals, double final_time)
    : intervals_(intervals), final_time_(final_time) {
  if (intervals < 2) throw DomainError("TemporalGrid: need at least 2 intervals");
  if (!(final_time > 0.0) || !std::isfinite(final_time))
    throw DomainError("TemporalGrid: final time must be positive and finite");
}

bool DetectorArc::contains(double phi) const noexcept {
  return phi >= lo - kAngleTol && phi <= hi + kAngleTol;
}

ScanGeometry::ScanGeometry(GeometryParams params) : p_(std::move(params)) {
  auto fail = [](const std::string& m) { throw ConfigError("geometry: " + m); };
  if (!(p_.radius > 0.0) || !std::isfinite(p_.radius)) fail("R must be positive");
  if (!(p_.sound_speed > 0.0) || !std::isfinite(p_.sound_speed)) fail("c0 must be positive");
  if (p_.nx < 2 || p_.nt < 2 || p_.nphi < 2) fail("grid counts must be >= 2");
  const double min_time = 2.0 * p_.radius / p_.sound_speed;
  final_time_ = p_.final_time.value_or(min_time);
  if (!std::isfinite(final_time_) || final_time_ < min_time * (1.0 - 1e-12))
    fail("T must be at least 2R/c0");
  for (const auto& a : p_.arcs) {
    if (!std::isfinite(a.lo) || !std::isfinite(a.hi) || a.lo > a.hi)
      fail("detector arc must satisfy lo <= hi");
  }
}

ScanGeometry ScanGeometry::square(double radius, double sound_speed, std::size_t n,
                                  std::vector<DetectorArc> arcs) {
  GeometryParams p;
  p.radius = radius;
  p.sound_speed = sound_speed;
  p.nx = p.nt = p.nphi = n;
  p.arcs = std::move(arcs);
  return ScanGeometry(std::move(p));
}

double ScanGeometry::dphi() const noexcept { return kTwoPi / static_cast<double>(p_.nphi); }

double ScanGeometry::detector_angle(std::size_t k) const noexcept {
  return static_cast<double>(k) * dphi();
}

Point2 ScanGeometry::detector(std::size_t k) const noexcept {
  const double phi = detector_angle(k);
  return {p_.radius * std::cos(phi), p_.radius * std::sin(phi)};
}

bool ScanGeometry::detector_active(std::size_t k) const noexcept {
  if (p_.arcs.empty()) return true;
  const double phi = detector_angle(k);
  return std::any_of(p_.arcs.begin(), p_.arcs.end(),
                     [phi](const DetectorArc& a) { return a.contains(phi); });
}

std::size_t ScanGeometry::active_detectors() const noexcept {
  std::size_t n = 0;
  for (std::size_t k = 0; k < p_.nphi; ++k) n += detector_active(k) ? 1 : 0;
  return n;
}

std::optional<std::string> ScanGeometry::sampling_warning() const {
  const double steps[3] = {dx(), dr(), p_.radius * dphi()};
  const double lo = *std::min_element(std::begin(steps), std::end(steps));
  const double hi = *std::max_element(std::begin(steps), std::end(steps));
  if (hi <= 1.25 * lo) return std::nullopt;
  std::ostringstream os;
  os << "sampling steps differ by more than 25%: dx=" << steps[0] << " c0*dt=" << steps[1]
     << " R*dphi=" << steps[2];
  return os.str();
}

ScanGeometry ScanGeometry::with_time_oversampling(std::size_t factor) const {
  if (factor == 0) throw ConfigError("geometry: oversampling factor must be >= 1");
  GeometryParams p = p_;
  p.nt *= factor;
  p.final_time = final_time_;
  return ScanGeometry(std::move(p));
}

ScanGeometry ScanGeometry::with_arcs(std::vector<DetectorArc> arcs) const {
  GeometryParams p = p_;
  p.final_time = final_time_;
  p.arcs = std::move(arcs);
  return ScanGeometry(std::move(p));
}

void require_image_shape(const ScanGeometry& g, const SourceImage& h, const char* where) {
  if (h.values.rows() != g.image_side() || h.values.cols() != g.image_side()) {
    std::ostringstream os;
    os << where << ": image is " << h.values.rows() << "x" << h.values.cols() << ", expected "
       << g.image_side() << "x" << g.image_side();
    throw DomainError(os.str());
  }
}

void require_sinogram_shape(const ScanGeometry& g, const Sinogram& s, const char* where) {
  if (s.values.rows() != g.nphi() || s.values.cols() != g.time_samples()) {
    std::ostringstream os;
    os << where << ": sinogram is " << s.values.rows() << "x" << s.values.cols()
       << ", expected " << g.nphi() << "x" << g.time_samples();
    throw DomainError(os.str());
  }
}

double image_norm(const ScanGeometry& g, const SourceImage& h) {
  return std::sqrt(g.image_weight()) * norm2(h.values.flat());
}

double data_norm(const ScanGeometry& g, const Sinogram& s) {
  return std::sqrt(g.data_weight()) * norm2(s.values.flat());
}

}  // namespace pat
