#include "pat/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <string>

#include "pat/error.hpp"
#include "pat/phantom.hpp"

namespace pat {
namespace {

double weighted_norm(std::span<const double> v, double weight) {
  return std::sqrt(weight) * norm2(v);
}

std::vector<double> gaussian_start(std::size_t n, std::uint64_t seed) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = gaussian_variate(seed, i);
  return x;
}

}  // namespace

AttenuatedWaveOperator::AttenuatedWaveOperator(const WaveOperator& wave,
                                               const KernelMatrix& kernel)
    : wave_(wave), kernel_(kernel) {
  const ScanGeometry& g = wave.geometry();
  if (kernel.grid.samples() != g.time_samples())
    throw DomainError("AttenuatedWaveOperator: kernel time grid does not match geometry");
}

std::size_t AttenuatedWaveOperator::domain_size() const {
  const std::size_t n = wave_.geometry().image_side();
  return n * n;
}

std::size_t AttenuatedWaveOperator::range_size() const {
  return wave_.geometry().nphi() * wave_.geometry().time_samples();
}

double AttenuatedWaveOperator::domain_weight() const { return wave_.geometry().image_weight(); }
double AttenuatedWaveOperator::range_weight() const { return wave_.geometry().data_weight(); }

void AttenuatedWaveOperator::apply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != domain_size() || y.size() != range_size())
    throw DomainError("AttenuatedWaveOperator::apply: size mismatch");
  const ScanGeometry& g = wave_.geometry();
  SourceImage h = SourceImage::zeros(g);
  std::copy(x.begin(), x.end(), h.values.flat().begin());
  const Sinogram out = forward_W_alpha(wave_, kernel_, h);
  std::copy(out.values.flat().begin(), out.values.flat().end(), y.begin());
}

void AttenuatedWaveOperator::apply_adjoint(std::span<const double> y,
                                           std::span<double> x) const {
  if (x.size() != domain_size() || y.size() != range_size())
    throw DomainError("AttenuatedWaveOperator::apply_adjoint: size mismatch");
  const ScanGeometry& g = wave_.geometry();
  Sinogram s = Sinogram::zeros(g);
  std::copy(y.begin(), y.end(), s.values.flat().begin());
  const SourceImage out = adjoint_W_alpha(wave_, kernel_, s);
  std::copy(out.values.flat().begin(), out.values.flat().end(), x.begin());
}

void validate(const SolverConfig& c) {
  if (!(c.tau > 1.0) || !std::isfinite(c.tau)) throw ConfigError("solver: tau must exceed 1");
  if (!(c.delta >= 0.0) || !std::isfinite(c.delta)) throw ConfigError("solver: delta must be >= 0");
  if (c.lambda && (!(*c.lambda > 0.0) || !std::isfinite(*c.lambda)))
    throw ConfigError("solver: lambda must be positive");
  if (c.norm_iters < 1) throw ConfigError("solver: norm_iters must be >= 1");
}

double estimate_operator_norm(const LinearMap& op, std::size_t iters, std::uint64_t seed) {
  if (iters < 1) throw ConfigError("estimate_operator_norm: iters must be >= 1");
  const double wd = op.domain_weight();
  const double wr = op.range_weight();
  std::vector<double> x = gaussian_start(op.domain_size(), seed);
  if (norm2(x) == 0.0) x = gaussian_start(op.domain_size(), seed + 1);
  if (norm2(x) == 0.0) throw NumericalError("estimate_operator_norm: zero start vector");

  std::vector<double> y(op.range_size());
  double quotient = 0.0;
  for (std::size_t it = 0; it < iters; ++it) {
    const double xn = weighted_norm(x, wd);
    for (double& v : x) v /= xn;
    op.apply(x, y);
    const double yn = weighted_norm(y, wr);
    quotient = yn * yn;  // ||x|| = 1
    if (!std::isfinite(quotient)) throw NumericalError("estimate_operator_norm: overflow");
    if (yn == 0.0) return 0.0;
    op.apply_adjoint(y, x);
    if (norm2(x) == 0.0) break;
  }
  return std::sqrt(quotient);
}

double estimate_operator_norm(const WaveOperator& wave, const KernelMatrix& kernel,
                              std::size_t iters, std::uint64_t seed) {
  return estimate_operator_norm(AttenuatedWaveOperator(wave, kernel), iters, seed);
}

void project_nonneg(std::span<double> x) noexcept {
  for (double& v : x) v = std::max(0.0, v);
}

SourceImage project_nonneg(SourceImage h) {
  project_nonneg(h.values.flat());
  return h;
}

bool discrepancy_stop(double residual, double tau, double delta) {
  if (!(tau > 1.0)) throw ConfigError("discrepancy_stop: tau must exceed 1");
  if (!(delta >= 0.0)) throw ConfigError("discrepancy_stop: delta must be >= 0");
  if (delta == 0.0) return false;
  return residual <= tau * delta;
}

LandweberResult landweber(const LinearMap& op, std::span<const double> data,
                          const SolverConfig& config,
                          std::optional<std::span<const double>> initial) {
  validate(config);
  if (data.size() != op.range_size()) throw DomainError("landweber: data size mismatch");
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  LandweberResult result;
  IterationTrace& trace = result.trace;
  if (config.lambda) {
    trace.lambda = *config.lambda;
  } else {
    trace.operator_norm = estimate_operator_norm(op, config.norm_iters, config.seed);
    if (!(trace.operator_norm > 0.0))
      throw NumericalError("landweber: operator norm estimate is zero");
    trace.lambda = 0.9 / (trace.operator_norm * trace.operator_norm);
  }

  std::vector<double>& x = result.solution;
  if (initial) {
    if (initial->size() != op.domain_size()) throw DomainError("landweber: initial size mismatch");
    x.assign(initial->begin(), initial->end());
  } else {
    x.assign(op.domain_size(), 0.0);
  }
  std::vector<double> r(op.range_size());
  std::vector<double> grad(op.domain_size());

  for (std::size_t n = 0;; ++n) {
    op.apply(x, r);
    axpy(-1.0, data, r);
    const double res = weighted_norm(r, op.range_weight());
    if (!std::isfinite(res))
      throw NumericalError("landweber: non-finite residual at iteration " + std::to_string(n));
    trace.residuals.push_back(res);
    trace.iterate_norms.push_back(weighted_norm(x, op.domain_weight()));
    trace.seconds.push_back(std::chrono::duration<double>(Clock::now() - start).count());
    if (discrepancy_stop(res, config.tau, config.delta)) {
      trace.stopped_at = n;
      break;
    }
    if (n == config.n_max) break;
    op.apply_adjoint(r, grad);
    axpy(-trace.lambda, grad, x);
    if (config.project) project_nonneg(x);
  }
  return result;
}

Reconstruction landweber(const Sinogram& data, const WaveOperator& wave,
                         const KernelMatrix& kernel, const SolverConfig& config) {
  require_sinogram_shape(wave.geometry(), data, "landweber");
  const AttenuatedWaveOperator op(wave, kernel);
  LandweberResult r = landweber(op, data.values.flat(), config);
  SourceImage image = SourceImage::zeros(wave.geometry());
  std::copy(r.solution.begin(), r.solution.end(), image.values.flat().begin());
  return {std::move(image), std::move(r.trace)};
}

void write_trace_csv(std::ostream& os, const IterationTrace& trace) {
  os << "iter,residual,seconds\n";
  const auto old = os.precision(17);
  for (std::size_t n = 0; n < trace.residuals.size(); ++n)
    os << n << ',' << trace.residuals[n] << ',' << trace.seconds[n] << '\n';
  os.precision(old);
}

}  // namespace pat
