#pragma once

// Un-attenuated 2D forward operator W = c0^{-1} d/dt A M on a circular
// detector array, its exact discrete adjoint, and the attenuated
// compositions W_alpha = M_alpha W and W_alpha^* = W^* M_alpha^*.
//
//   M  spherical means: trapezoid rule over N_beta = s N_phi angles, bilinear
//      interpolation of the image (zero outside the grid); nodes outside
//      the detection disc |x| <= R are ignored
//   A  Abel transform: exact integration of the piecewise-linear interpolant
//      against r / sqrt(c0^2 t^2 - r^2)
//   d/dt  second-order finite differences
//
// Adjoints are literal transposes of these stages under the inner products
// <h, h'> = dx^2 sum h h'  and  <g, g'> = R dphi dt sum g g'.

#include <cstddef>
#include <span>
#include <vector>

#include "pat/array2d.hpp"
#include "pat/geometry.hpp"
#include "pat/kernel.hpp"

namespace pat {

/// Default ratio N_beta / N_phi of the angular quadrature.
inline constexpr std::size_t kDefaultAngularOversampling = 2;

class WaveOperator {
 public:
  /// Throws ConfigError for angular_oversampling == 0.
  explicit WaveOperator(ScanGeometry geometry,
                        std::size_t angular_oversampling = kDefaultAngularOversampling);

  const ScanGeometry& geometry() const noexcept { return geometry_; }
  /// Number N_beta of trapezoid nodes on each integration circle.
  std::size_t angular_nodes() const noexcept { return cos_beta_.size(); }

  /// Radial data q[k, l] ~ mean of h over the circle |x - y_k| = c0 t_l.
  Array2D spherical_means(const SourceImage& h) const;
  /// Plain matrix transpose of spherical_means (unweighted).
  SourceImage spherical_means_transpose(const Array2D& q) const;

  /// out[k, l] ~ int_0^{c0 t_l} r q(y_k, r) / sqrt(c0^2 t_l^2 - r^2) dr.
  Array2D abel_transform(const Array2D& q) const;
  Array2D abel_transform_transpose(const Array2D& q) const;

  /// d/dt along the time axis.
  Array2D time_derivative(const Array2D& g) const;
  Array2D time_derivative_transpose(const Array2D& g) const;

  /// Zeroes rows of inactive detectors in place.
  void apply_mask(Array2D& g) const;

  Sinogram forward(const SourceImage& h) const;
  /// Exact adjoint of forward() under the weighted inner products.
  SourceImage adjoint(const Sinogram& g) const;

  /// Abel weights for l' = 0..l of row l (exposed for tests).
  std::span<const double> abel_row(std::size_t l) const;

 private:
  ScanGeometry geometry_;
  std::vector<double> cos_beta_;
  std::vector<double> sin_beta_;
  std::vector<Point2> detectors_;
  // 1 for image nodes with |x_i| <= R, 0 otherwise.
  std::vector<double> inside_;
  // Row l holds weights for nodes 0..l, stored with stride samples().
  std::vector<double> abel_;
};

Array2D spherical_means(const ScanGeometry& g, const SourceImage& h);
Array2D abel_transform(const ScanGeometry& g, const Array2D& q);
Array2D time_derivative(const ScanGeometry& g, const Array2D& data);

Sinogram forward_W(const ScanGeometry& g, const SourceImage& h);
SourceImage adjoint_W(const ScanGeometry& g, const Sinogram& data);

/// W_alpha = M_alpha o W.
Sinogram forward_W_alpha(const WaveOperator& wave, const KernelMatrix& kernel,
                         const SourceImage& h);
/// W_alpha^* = W^* o M_alpha^*.
SourceImage adjoint_W_alpha(const WaveOperator& wave, const KernelMatrix& kernel,
                            const Sinogram& data);

}  // namespace pat
