#include "fft.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace pat::detail {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

ForwardDft::ForwardDft(std::size_t length) : length_(length), in_(length), out_(length) {
  std::lock_guard lock(planner_mutex());
  plan_ = fftw_plan_dft_1d(static_cast<int>(length), reinterpret_cast<fftw_complex*>(in_.data()),
                           reinterpret_cast<fftw_complex*>(out_.data()), FFTW_FORWARD,
                           FFTW_ESTIMATE);
  if (plan_ == nullptr) throw std::runtime_error("fftw: plan creation failed");
}

ForwardDft::~ForwardDft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

void ForwardDft::execute(std::span<const std::complex<double>> in,
                         std::span<std::complex<double>> out) {
  if (in.size() != length_ || out.size() != length_)
    throw std::invalid_argument("ForwardDft: length mismatch");
  std::copy(in.begin(), in.end(), in_.begin());
  fftw_execute(static_cast<fftw_plan>(plan_));
  std::copy(out_.begin(), out_.end(), out.begin());
}

void hermitian_complete(std::span<std::complex<double>> spectrum) {
  const std::size_t n = spectrum.size();
  if (n == 0) return;
  spectrum[0] = spectrum[0].real();
  for (std::size_t j = 1; j < (n + 1) / 2; ++j) spectrum[n - j] = std::conj(spectrum[j]);
  if (n % 2 == 0) spectrum[n / 2] = spectrum[n / 2].real();
}

}  // namespace pat::detail
