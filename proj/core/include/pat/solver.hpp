#pragma once

// Projected Landweber iteration with a power-iteration step-size rule and
// the discrepancy stopping rule.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "pat/geometry.hpp"
#include "pat/kernel.hpp"
#include "pat/wave.hpp"

namespace pat {

/// Real linear map between weighted Euclidean spaces
/// <x, x'> = domain_weight() x.x' and <y, y'> = range_weight() y.y'.
/// apply_adjoint must be the adjoint under these weights.
class LinearMap {
 public:
  virtual ~LinearMap() = default;
  virtual std::size_t domain_size() const = 0;
  virtual std::size_t range_size() const = 0;
  virtual double domain_weight() const { return 1.0; }
  virtual double range_weight() const { return 1.0; }
  virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
  virtual void apply_adjoint(std::span<const double> y, std::span<double> x) const = 0;
};

/// W_alpha with images and sinograms flattened row-major.
class AttenuatedWaveOperator final : public LinearMap {
 public:
  AttenuatedWaveOperator(const WaveOperator& wave, const KernelMatrix& kernel);

  std::size_t domain_size() const override;
  std::size_t range_size() const override;
  double domain_weight() const override;
  double range_weight() const override;
  void apply(std::span<const double> x, std::span<double> y) const override;
  void apply_adjoint(std::span<const double> y, std::span<double> x) const override;

  const WaveOperator& wave() const noexcept { return wave_; }
  const KernelMatrix& kernel() const noexcept { return kernel_; }

 private:
  const WaveOperator& wave_;
  const KernelMatrix& kernel_;
};

struct SolverConfig {
  /// Step size; nullopt selects 0.9 / ||W_alpha||^2.
  std::optional<double> lambda;
  std::size_t n_max = 10;
  double tau = 1.5;
  /// Noise level in the weighted data norm; 0 disables stopping.
  double delta = 0.0;
  bool project = true;
  std::size_t norm_iters = 30;
  std::uint64_t seed = 1;
};

/// Throws ConfigError unless tau > 1, delta >= 0, lambda > 0 when given
/// and norm_iters >= 1.
void validate(const SolverConfig& config);

struct IterationTrace {
  /// Weighted ||W_alpha h_n - g||, n = 0..iterations().
  std::vector<double> residuals;
  /// Weighted ||h_n||.
  std::vector<double> iterate_norms;
  /// Wall time since the start of the loop when residual n was recorded.
  std::vector<double> seconds;
  /// First n with residual <= tau delta.
  std::optional<std::size_t> stopped_at;
  double lambda = 0.0;
  /// Estimate used for the automatic step; 0 when lambda was given.
  double operator_norm = 0.0;

  std::size_t iterations() const noexcept {
    return residuals.empty() ? 0 : residuals.size() - 1;
  }
};

/// sqrt of the final Rayleigh quotient ||A x||^2 / ||x||^2 of `iters` power
/// steps on A^* A from a seeded Gaussian start.
double estimate_operator_norm(const LinearMap& op, std::size_t iters, std::uint64_t seed);
double estimate_operator_norm(const WaveOperator& wave, const KernelMatrix& kernel,
                              std::size_t iters, std::uint64_t seed);

SourceImage project_nonneg(SourceImage h);
void project_nonneg(std::span<double> x) noexcept;

/// residual <= tau delta; always false for delta = 0. Throws ConfigError
/// for tau <= 1 or delta < 0.
bool discrepancy_stop(double residual, double tau, double delta);

struct LandweberResult {
  std::vector<double> solution;
  IterationTrace trace;
};

/// h_{n+1} = P(h_n - lambda A^*(A h_n - g)). Throws NumericalError naming
/// the iteration when a residual is not finite.
LandweberResult landweber(const LinearMap& op, std::span<const double> data,
                          const SolverConfig& config,
                          std::optional<std::span<const double>> initial = std::nullopt);

struct Reconstruction {
  SourceImage image;
  IterationTrace trace;
};

Reconstruction landweber(const Sinogram& data, const WaveOperator& wave,
                         const KernelMatrix& kernel, const SolverConfig& config);

/// Columns iter,residual,seconds.
void write_trace_csv(std::ostream& os, const IterationTrace& trace);

}  // namespace pat
