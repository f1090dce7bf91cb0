#include "pat/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fft.hpp"
#include "pat/error.hpp"
#include "pat/parallel.hpp"

namespace pat {
namespace {

constexpr double kPi = std::numbers::pi;
// exp() of a larger real part overflows double.
constexpr double kMaxExponent = 700.0;
constexpr double kMaxImagResidue = 1e-8;
constexpr std::size_t kMaxChunks = 64;

std::string frequency_message(const char* what, double omega) {
  std::ostringstream os;
  os.precision(6);
  os << what << " at omega = " << omega << " rad/s";
  return os.str();
}

void require_matching(const KernelMatrix& kernel, const Sinogram& g, const char* where) {
  if (g.values.cols() != kernel.grid.samples()) {
    std::ostringstream os;
    os << where << ": sinogram has " << g.values.cols() << " time samples, kernel expects "
       << kernel.grid.samples();
    throw DomainError(os.str());
  }
}

// Inverse transform of a half spectrum (j = 0..L/2) into the first `keep`
// real time samples, scaled by `scale`.
void half_spectrum_to_time(detail::ForwardDft& dft, std::vector<std::complex<double>>& spectrum,
                           std::vector<std::complex<double>>& time, double scale,
                           std::span<double> out, const char* what) {
  detail::hermitian_complete(spectrum);
  // With the e^{+i w t} forward convention the inverse transform carries
  // e^{-i w t}, i.e. the forward DFT sign.
  dft.execute(spectrum, time);
  double max_mod = 0.0;
  double max_imag = 0.0;
  for (std::size_t l = 0; l < out.size(); ++l) {
    max_mod = std::max(max_mod, std::abs(time[l]));
    max_imag = std::max(max_imag, std::abs(time[l].imag()));
  }
  if (max_imag > kMaxImagResidue * std::max(max_mod, 1e-300)) {
    throw NumericalError(std::string(what) + ": inverse transform is not real-valued");
  }
  for (std::size_t l = 0; l < out.size(); ++l) out[l] = time[l].real() * scale;
}

}  // namespace

KernelMatrix build_kernel_matrix(const AttenuationLaw& law, const TemporalGrid& grid,
                                 double sound_speed) {
  if (!(sound_speed > 0.0) || !std::isfinite(sound_speed))
    throw DomainError("build_kernel_matrix: sound speed must be positive");
  const std::size_t n = grid.samples();
  const std::size_t length = 2 * n;
  const std::size_t half = length / 2;
  const double dr = sound_speed * grid.step();
  const double dk = 2.0 * kPi / (static_cast<double>(length) * dr);

  std::vector<double> wavenumber(half + 1);
  std::vector<Complex> alpha(half + 1);
  std::vector<Complex> factor(half + 1);
  for (std::size_t j = 0; j <= half; ++j) {
    const double k = static_cast<double>(j) * dk;
    wavenumber[j] = k;
    alpha[j] = law(sound_speed * k);
    // k / (k + i alpha) -> 1 as k -> 0 since alpha(0) = 0.
    factor[j] = j == 0 ? Complex{1.0, 0.0} : k / (k + Complex{0.0, 1.0} * alpha[j]);
    if (!std::isfinite(factor[j].real()) || !std::isfinite(factor[j].imag()))
      throw NumericalError(
          frequency_message("build_kernel_matrix: singular spectrum", sound_speed * k));
  }

  KernelMatrix kernel{grid, Array2D(n, n), law.tag(), false};
  const double inv_len = 1.0 / static_cast<double>(length);
  const double inv_dt = 1.0 / grid.step();

  parallel_chunks(n, kMaxChunks, [&](std::size_t begin, std::size_t end, std::size_t) {
    detail::ForwardDft dft(length);
    std::vector<Complex> spectrum(length), time(length);
    std::vector<double> column(n);
    for (std::size_t lp = begin; lp < end; ++lp) {
      const double r = static_cast<double>(lp) * dr;
      for (std::size_t j = 0; j <= half; ++j) {
        const double damping = -alpha[j].real() * r;
        if (!(damping < kMaxExponent))
          throw NumericalError(frequency_message("build_kernel_matrix: spectrum overflows",
                                                 sound_speed * wavenumber[j]));
        // exp(i k r) evaluated from the exact phase index j * l' mod L.
        const double phase =
            2.0 * kPi * static_cast<double>((j * lp) % length) * inv_len - alpha[j].imag() * r;
        spectrum[j] = factor[j] * std::polar(std::exp(damping), phase);
      }
      half_spectrum_to_time(dft, spectrum, time, inv_len * inv_dt, column,
                            "build_kernel_matrix");
      for (std::size_t l = 0; l < n; ++l) kernel.m(l, lp) = column[l];
    }
  });
  return causal_truncate(std::move(kernel));
}

KernelMatrix causal_truncate(KernelMatrix kernel) {
  const std::size_t n = kernel.m.rows();
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t lp = l + 1; lp < kernel.m.cols(); ++lp) kernel.m(l, lp) = 0.0;
  }
  kernel.causal = true;
  return kernel;
}

Sinogram apply_M(const KernelMatrix& kernel, const Sinogram& g) {
  require_matching(kernel, g, "apply_M");
  const std::size_t n = kernel.grid.samples();
  const double dt = kernel.grid.step();
  Sinogram out(Array2D(g.values.rows(), n));
  parallel_chunks(g.values.rows(), kMaxChunks, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t k = begin; k < end; ++k) {
      const auto in = g.values.row(k);
      auto dst = out.values.row(k);
      for (std::size_t l = 0; l < n; ++l) {
        const double* mrow = kernel.m.data() + l * n;
        double s = 0.0;
        for (std::size_t lp = 0; lp <= l; ++lp) s += mrow[lp] * in[lp];
        dst[l] = dt * s;
      }
    }
  });
  return out;
}

Sinogram apply_M_adjoint(const KernelMatrix& kernel, const Sinogram& g) {
  require_matching(kernel, g, "apply_M_adjoint");
  const std::size_t n = kernel.grid.samples();
  const double dt = kernel.grid.step();
  Sinogram out(Array2D(g.values.rows(), n));
  parallel_chunks(g.values.rows(), kMaxChunks, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t k = begin; k < end; ++k) {
      const auto in = g.values.row(k);
      auto dst = out.values.row(k);
      for (std::size_t l = 0; l < n; ++l) {
        const double* mrow = kernel.m.data() + l * n;
        const double gl = dt * in[l];
        if (gl == 0.0) continue;
        for (std::size_t lp = 0; lp <= l; ++lp) dst[lp] += mrow[lp] * gl;
      }
    }
  });
  return out;
}

std::vector<double> greens_profile(const AttenuationLaw& law, double distance,
                                   const TemporalGrid& grid, double sound_speed) {
  if (!(distance > 0.0) || !std::isfinite(distance))
    throw DomainError("greens_profile: distance must be positive");
  if (!(sound_speed > 0.0)) throw DomainError("greens_profile: sound speed must be positive");
  const std::size_t n = grid.samples();
  const std::size_t length = 2 * n;
  const double dt = grid.step();
  const double domega = 2.0 * kPi / (static_cast<double>(length) * dt);
  const double delay = distance / sound_speed;
  const double amplitude = 1.0 / (4.0 * kPi * distance);

  std::vector<Complex> spectrum(length), time(length);
  for (std::size_t j = 0; j <= length / 2; ++j) {
    const double omega = static_cast<double>(j) * domega;
    const Complex a = law(omega);
    const double damping = -distance * a.real();
    if (!(damping < kMaxExponent))
      throw NumericalError(frequency_message("greens_profile: spectrum overflows", omega));
    spectrum[j] = amplitude * std::polar(std::exp(damping), omega * delay - distance * a.imag());
  }
  detail::ForwardDft dft(length);
  std::vector<double> out(n);
  half_spectrum_to_time(dft, spectrum, time, 1.0 / (static_cast<double>(length) * dt), out,
                        "greens_profile");
  return out;
}

double support_width(std::span<const double> column, double fraction) {
  if (column.empty()) return 0.0;
  const auto peak_it = std::max_element(column.begin(), column.end());
  const double peak = *peak_it;
  if (!(peak > 0.0)) return 0.0;
  const double threshold = fraction * peak;
  std::size_t lo = static_cast<std::size_t>(peak_it - column.begin());
  std::size_t hi = lo;
  while (lo > 0 && column[lo - 1] > threshold) --lo;
  while (hi + 1 < column.size() && column[hi + 1] > threshold) ++hi;
  double left = static_cast<double>(lo);
  double right = static_cast<double>(hi);
  if (lo > 0) left -= (column[lo] - threshold) / (column[lo] - column[lo - 1]);
  if (hi + 1 < column.size()) right += (column[hi] - threshold) / (column[hi] - column[hi + 1]);
  return right - left;
}

std::vector<double> kernel_column(const KernelMatrix& kernel, std::size_t column) {
  if (column >= kernel.m.cols()) throw DomainError("kernel_column: index out of range");
  std::vector<double> out(kernel.m.rows());
  for (std::size_t l = 0; l < out.size(); ++l) out[l] = kernel.m(l, column);
  return out;
}

}  // namespace pat
