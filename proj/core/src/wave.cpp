#include "pat/wave.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pat/error.hpp"
#include "pat/parallel.hpp"

namespace pat {
namespace {

constexpr std::size_t kRowChunks = 64;
// Per-chunk image buffers for the backprojection scatter.
constexpr std::size_t kScatterChunks = 16;

struct Bilinear {
  std::ptrdiff_t i0;
  std::ptrdiff_t j0;
  double fu;
  double fv;
};

// Fractional node coordinates of point (px, py); nullopt-like flag when no
// node of the surrounding cell lies on the grid.
inline bool locate(double px, double py, double origin, double inv_dx, std::ptrdiff_t last,
                   Bilinear& b) {
  const double u = (px - origin) * inv_dx;
  const double v = (py - origin) * inv_dx;
  if (!(u > -1.0 && v > -1.0 && u < static_cast<double>(last + 1) &&
        v < static_cast<double>(last + 1)))
    return false;
  const double fu0 = std::floor(u);
  const double fv0 = std::floor(v);
  b.i0 = static_cast<std::ptrdiff_t>(fu0);
  b.j0 = static_cast<std::ptrdiff_t>(fv0);
  b.fu = u - fu0;
  b.fv = v - fv0;
  return true;
}

inline bool inside(std::ptrdiff_t i, std::ptrdiff_t last) { return i >= 0 && i <= last; }

void check_radial_shape(const ScanGeometry& g, const Array2D& a, const char* where) {
  if (a.rows() != g.nphi() || a.cols() != g.time_samples())
    throw DomainError(std::string(where) + ": data shape does not match geometry");
}

}  // namespace

WaveOperator::WaveOperator(ScanGeometry geometry, std::size_t angular_oversampling)
    : geometry_(std::move(geometry)) {
  if (angular_oversampling == 0) throw ConfigError("wave: angular oversampling must be >= 1");
  const std::size_t nbeta = geometry_.nphi() * angular_oversampling;
  cos_beta_.resize(nbeta);
  sin_beta_.resize(nbeta);
  for (std::size_t m = 0; m < nbeta; ++m) {
    const double beta = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(nbeta);
    cos_beta_[m] = std::cos(beta);
    sin_beta_[m] = std::sin(beta);
  }
  detectors_.resize(geometry_.nphi());
  for (std::size_t k = 0; k < detectors_.size(); ++k) detectors_[k] = geometry_.detector(k);

  const std::size_t side = geometry_.image_side();
  const double r2 = geometry_.radius() * geometry_.radius() * (1.0 + 1e-12);
  inside_.assign(side * side, 0.0);
  for (std::size_t i1 = 0; i1 < side; ++i1) {
    const double x = geometry_.node(i1);
    for (std::size_t i2 = 0; i2 < side; ++i2) {
      const double y = geometry_.node(i2);
      if (x * x + y * y <= r2) inside_[i1 * side + i2] = 1.0;
    }
  }

  // Exact integrals of the hat functions against r / sqrt(s^2 - r^2) with
  // unit node spacing; scaled by dr at the end.
  const std::size_t n = geometry_.time_samples();
  abel_.assign(n * n, 0.0);
  for (std::size_t l = 1; l < n; ++l) {
    const double s = static_cast<double>(l);
    auto root = [s](double r) { return std::sqrt(std::max(0.0, (s - r) * (s + r))); };
    auto second = [s, &root](double r) {
      return 0.5 * s * s * std::asin(std::min(1.0, r / s)) - 0.5 * r * root(r);
    };
    double* row = abel_.data() + l * n;
    for (std::size_t i = 0; i < l; ++i) {
      const double a = static_cast<double>(i);
      const double b = a + 1.0;
      const double m0 = root(a) - root(b);       // int r / sqrt
      const double m1 = second(b) - second(a);   // int r^2 / sqrt
      row[i] += b * m0 - m1;
      row[i + 1] += m1 - a * m0;
    }
  }
  const double dr = geometry_.dr();
  for (double& w : abel_) w *= dr;
}

std::span<const double> WaveOperator::abel_row(std::size_t l) const {
  const std::size_t n = geometry_.time_samples();
  return {abel_.data() + l * n, l + 1};
}

Array2D WaveOperator::spherical_means(const SourceImage& h) const {
  require_image_shape(geometry_, h, "spherical_means");
  const std::size_t nphi = geometry_.nphi();
  const std::size_t nt = geometry_.time_samples();
  const std::size_t nbeta = cos_beta_.size();
  const std::size_t side = geometry_.image_side();
  const auto last = static_cast<std::ptrdiff_t>(side - 1);
  const double origin = -geometry_.radius();
  const double inv_dx = 1.0 / geometry_.dx();
  const double dr = geometry_.dr();
  const double inv_nbeta = 1.0 / static_cast<double>(nbeta);
  std::vector<double> masked(h.values.flat().begin(), h.values.flat().end());
  for (std::size_t i = 0; i < masked.size(); ++i) masked[i] *= inside_[i];
  const double* img = masked.data();

  Array2D out(nphi, nt);
  parallel_chunks(nphi, kRowChunks, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t k = begin; k < end; ++k) {
      const Point2 y = detectors_[k];
      for (std::size_t l = 0; l < nt; ++l) {
        const double r = static_cast<double>(l) * dr;
        double sum = 0.0;
        for (std::size_t m = 0; m < nbeta; ++m) {
          Bilinear b;
          if (!locate(y.x + r * cos_beta_[m], y.y + r * sin_beta_[m], origin, inv_dx, last, b))
            continue;
          const bool i_in = inside(b.i0, last), i1_in = inside(b.i0 + 1, last);
          const bool j_in = inside(b.j0, last), j1_in = inside(b.j0 + 1, last);
          const double wu0 = 1.0 - b.fu, wv0 = 1.0 - b.fv;
          const std::ptrdiff_t base = b.i0 * static_cast<std::ptrdiff_t>(side) + b.j0;
          if (i_in && j_in) sum += wu0 * wv0 * img[base];
          if (i_in && j1_in) sum += wu0 * b.fv * img[base + 1];
          if (i1_in && j_in) sum += b.fu * wv0 * img[base + static_cast<std::ptrdiff_t>(side)];
          if (i1_in && j1_in) sum += b.fu * b.fv * img[base + static_cast<std::ptrdiff_t>(side) + 1];
        }
        out(k, l) = sum * inv_nbeta;
      }
    }
  });
  return out;
}

SourceImage WaveOperator::spherical_means_transpose(const Array2D& q) const {
  check_radial_shape(geometry_, q, "spherical_means_transpose");
  const std::size_t nphi = geometry_.nphi();
  const std::size_t nt = geometry_.time_samples();
  const std::size_t nbeta = cos_beta_.size();
  const std::size_t side = geometry_.image_side();
  const auto last = static_cast<std::ptrdiff_t>(side - 1);
  const double origin = -geometry_.radius();
  const double inv_dx = 1.0 / geometry_.dx();
  const double dr = geometry_.dr();
  const double inv_nbeta = 1.0 / static_cast<double>(nbeta);

  const std::size_t chunks = chunk_count(nphi, kScatterChunks);
  std::vector<Array2D> partial(chunks);
  parallel_chunks(nphi, kScatterChunks, [&](std::size_t begin, std::size_t end, std::size_t c) {
    Array2D acc(side, side);
    double* img = acc.data();
    for (std::size_t k = begin; k < end; ++k) {
      const Point2 y = detectors_[k];
      for (std::size_t l = 0; l < nt; ++l) {
        const double value = q(k, l) * inv_nbeta;
        if (value == 0.0) continue;
        const double r = static_cast<double>(l) * dr;
        for (std::size_t m = 0; m < nbeta; ++m) {
          Bilinear b;
          if (!locate(y.x + r * cos_beta_[m], y.y + r * sin_beta_[m], origin, inv_dx, last, b))
            continue;
          const bool i_in = inside(b.i0, last), i1_in = inside(b.i0 + 1, last);
          const bool j_in = inside(b.j0, last), j1_in = inside(b.j0 + 1, last);
          const double wu0 = 1.0 - b.fu, wv0 = 1.0 - b.fv;
          const std::ptrdiff_t base = b.i0 * static_cast<std::ptrdiff_t>(side) + b.j0;
          if (i_in && j_in) img[base] += wu0 * wv0 * value;
          if (i_in && j1_in) img[base + 1] += wu0 * b.fv * value;
          if (i1_in && j_in) img[base + static_cast<std::ptrdiff_t>(side)] += b.fu * wv0 * value;
          if (i1_in && j1_in)
            img[base + static_cast<std::ptrdiff_t>(side) + 1] += b.fu * b.fv * value;
        }
      }
    }
    partial[c] = std::move(acc);
  });

  SourceImage out = SourceImage::zeros(geometry_);
  for (const Array2D& p : partial) axpy(1.0, p.flat(), out.values.flat());
  auto flat = out.values.flat();
  for (std::size_t i = 0; i < flat.size(); ++i) flat[i] *= inside_[i];
  return out;
}

Array2D WaveOperator::abel_transform(const Array2D& q) const {
  check_radial_shape(geometry_, q, "abel_transform");
  const std::size_t n = geometry_.time_samples();
  Array2D out(q.rows(), n);
  parallel_chunks(q.rows(), kRowChunks, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t k = begin; k < end; ++k) {
      const auto in = q.row(k);
      auto dst = out.row(k);
      for (std::size_t l = 0; l < n; ++l) {
        const double* w = abel_.data() + l * n;
        double s = 0.0;
        for (std::size_t j = 0; j <= l; ++j) s += w[j] * in[j];
        dst[l] = s;
      }
    }
  });
  return out;
}

Array2D WaveOperator::abel_transform_transpose(const Array2D& q) const {
  check_radial_shape(geometry_, q, "abel_transform_transpose");
  const std::size_t n = geometry_.time_samples();
  Array2D out(q.rows(), n);
  parallel_chunks(q.rows(), kRowChunks, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t k = begin; k < end; ++k) {
      const auto in = q.row(k);
      auto dst = out.row(k);
      for (std::size_t l = 0; l < n; ++l) {
        const double v = in[l];
        if (v == 0.0) continue;
        const double* w = abel_.data() + l * n;
        for (std::size_t j = 0; j <= l; ++j) dst[j] += w[j] * v;
      }
    }
  });
  return out;
}

Array2D WaveOperator::time_derivative(const Array2D& g) const {
  check_radial_shape(geometry_, g, "time_derivative");
  const std::size_t n = g.cols();
  const double inv2dt = 0.5 / geometry_.dt();
  Array2D out(g.rows(), n);
  for (std::size_t k = 0; k < g.rows(); ++k) {
    const auto in = g.row(k);
    auto dst = out.row(k);
    dst[0] = (-3.0 * in[0] + 4.0 * in[1] - in[2]) * inv2dt;
    for (std::size_t l = 1; l + 1 < n; ++l) dst[l] = (in[l + 1] - in[l - 1]) * inv2dt;
    dst[n - 1] = (3.0 * in[n - 1] - 4.0 * in[n - 2] + in[n - 3]) * inv2dt;
  }
  return out;
}

Array2D WaveOperator::time_derivative_transpose(const Array2D& g) const {
  check_radial_shape(geometry_, g, "time_derivative_transpose");
  const std::size_t n = g.cols();
  const double inv2dt = 0.5 / geometry_.dt();
  Array2D out(g.rows(), n);
  for (std::size_t k = 0; k < g.rows(); ++k) {
    const auto in = g.row(k);
    auto dst = out.row(k);
    dst[0] += -3.0 * in[0] * inv2dt;
    dst[1] += 4.0 * in[0] * inv2dt;
    dst[2] += -in[0] * inv2dt;
    for (std::size_t l = 1; l + 1 < n; ++l) {
      dst[l + 1] += in[l] * inv2dt;
      dst[l - 1] -= in[l] * inv2dt;
    }
    dst[n - 1] += 3.0 * in[n - 1] * inv2dt;
    dst[n - 2] += -4.0 * in[n - 1] * inv2dt;
    dst[n - 3] += in[n - 1] * inv2dt;
  }
  return out;
}

void WaveOperator::apply_mask(Array2D& g) const {
  if (geometry_.full_view()) return;
  for (std::size_t k = 0; k < g.rows(); ++k) {
    if (!geometry_.detector_active(k)) std::fill(g.row(k).begin(), g.row(k).end(), 0.0);
  }
}

Sinogram WaveOperator::forward(const SourceImage& h) const {
  Array2D data = time_derivative(abel_transform(spherical_means(h)));
  const double scale = 1.0 / geometry_.sound_speed();
  for (double& v : data.flat()) v *= scale;
  apply_mask(data);
  return Sinogram(std::move(data));
}

SourceImage WaveOperator::adjoint(const Sinogram& g) const {
  require_sinogram_shape(geometry_, g, "adjoint_W");
  Array2D data = g.values;
  apply_mask(data);
  const double scale =
      geometry_.data_weight() / (geometry_.image_weight() * geometry_.sound_speed());
  for (double& v : data.flat()) v *= scale;
  return spherical_means_transpose(abel_transform_transpose(time_derivative_transpose(data)));
}

Array2D spherical_means(const ScanGeometry& g, const SourceImage& h) {
  return WaveOperator(g).spherical_means(h);
}

Array2D abel_transform(const ScanGeometry& g, const Array2D& q) {
  return WaveOperator(g).abel_transform(q);
}

Array2D time_derivative(const ScanGeometry& g, const Array2D& data) {
  return WaveOperator(g).time_derivative(data);
}

Sinogram forward_W(const ScanGeometry& g, const SourceImage& h) {
  return WaveOperator(g).forward(h);
}

SourceImage adjoint_W(const ScanGeometry& g, const Sinogram& data) {
  return WaveOperator(g).adjoint(data);
}

namespace {

void require_kernel_grid(const WaveOperator& wave, const KernelMatrix& kernel) {
  const ScanGeometry& g = wave.geometry();
  if (kernel.grid.samples() != g.time_samples() ||
      std::abs(kernel.grid.step() - g.dt()) > 1e-12 * g.dt())
    throw DomainError("attenuated operator: kernel time grid does not match geometry");
}

}  // namespace

Sinogram forward_W_alpha(const WaveOperator& wave, const KernelMatrix& kernel,
                         const SourceImage& h) {
  require_kernel_grid(wave, kernel);
  return apply_M(kernel, wave.forward(h));
}

SourceImage adjoint_W_alpha(const WaveOperator& wave, const KernelMatrix& kernel,
                            const Sinogram& data) {
  require_kernel_grid(wave, kernel);
  require_sinogram_shape(wave.geometry(), data, "adjoint_W_alpha");
  return wave.adjoint(apply_M_adjoint(kernel, data));
}

}  // namespace pat
