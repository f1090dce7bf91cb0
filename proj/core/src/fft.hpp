#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace pat::detail {

/// Out-of-place complex DFT  X_n = sum_j x_j exp(-2 pi i j n / L)  of fixed length.
/// One instance per thread; construction serializes on the planner lock.
class ForwardDft {
 public:
  explicit ForwardDft(std::size_t length);
  ~ForwardDft();
  ForwardDft(const ForwardDft&) = delete;
  ForwardDft& operator=(const ForwardDft&) = delete;

  std::size_t length() const noexcept { return length_; }
  void execute(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

 private:
  std::size_t length_;
  void* plan_ = nullptr;
  std::vector<std::complex<double>> in_;
  std::vector<std::complex<double>> out_;
};

/// Fills spectrum[L - j] = conj(spectrum[j]) for 0 < j < L/2, forces the DC
/// and (for even L) Nyquist bins real. Entries j <= L/2 must be set.
void hermitian_complete(std::span<std::complex<double>> spectrum);

}  // namespace pat::detail
