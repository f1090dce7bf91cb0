#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/SVD>
#include <gtest/gtest.h>

#include "pat/error.hpp"
#include "pat/kernel.hpp"
#include "pat/phantom.hpp"
#include "pat/solver.hpp"
#include "probe.hpp"

namespace pat {
namespace {

constexpr double kR = 0.05;
constexpr double kC0 = 1540.0;

struct Problem {
  explicit Problem(std::size_t n)
      : geometry(ScanGeometry::square(kR, kC0, n)),
        wave(geometry),
        kernel(build_kernel_matrix(AttenuationLaw(NswLaw{kC0, 1623.0, 1e-7}),
                                   geometry.temporal_grid(), kC0)),
        op(wave, kernel) {}

  SourceImage disc() const {
    return rasterize(PhantomSpec{{Primitive::disc({0.01, -0.005}, 0.012, 1.0)}}, geometry);
  }

  ScanGeometry geometry;
  WaveOperator wave;
  KernelMatrix kernel;
  AttenuatedWaveOperator op;
};

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

TEST(OperatorNorm, Identity) {
  const testing::DenseMap id(Eigen::MatrixXd::Identity(20, 20), 0.3, 0.3);
  EXPECT_NEAR(estimate_operator_norm(id, 5, 1), 1.0, 1e-10);
}

TEST(OperatorNorm, MatchesDenseSvd) {
  const Problem p(16);
  const Eigen::MatrixXd a = testing::probe_forward(p.op);
  const double sigma = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0) *
                       std::sqrt(p.op.range_weight() / p.op.domain_weight());
  const double estimate = estimate_operator_norm(p.wave, p.kernel, 50, 3);
  EXPECT_NEAR(estimate / sigma, 1.0, 0.01);
  EXPECT_LE(estimate, sigma * (1.0 + 1e-12));
}

TEST(OperatorNorm, NondecreasingInIterations) {
  const Problem p(16);
  const double e10 = estimate_operator_norm(p.op, 10, 5);
  const double e50 = estimate_operator_norm(p.op, 50, 5);
  EXPECT_GE(e50, e10 - 1e-12 * e10);
  EXPECT_THROW(estimate_operator_norm(p.op, 0, 5), ConfigError);
}

TEST(Projection, Cases) {
  std::vector<double> x{-1.0, 2.0};
  project_nonneg(x);
  EXPECT_EQ(x, (std::vector<double>{0.0, 2.0}));
  std::vector<double> pos{0.0, 1.0, 3.0};
  const std::vector<double> copy = pos;
  project_nonneg(pos);
  EXPECT_EQ(pos, copy);
  project_nonneg(pos);
  EXPECT_EQ(pos, copy);
}

TEST(Projection, Nonexpansive) {
  for (unsigned seed = 0; seed < 20; ++seed) {
    std::vector<double> a = random_vector(50, seed), b = random_vector(50, seed + 100);
    double before = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) before += std::pow(a[i] - b[i], 2);
    project_nonneg(a);
    project_nonneg(b);
    double after = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) after += std::pow(a[i] - b[i], 2);
    EXPECT_LE(after, before);
  }
}

TEST(Discrepancy, Rule) {
  EXPECT_TRUE(discrepancy_stop(0.0, 1.5, 0.1));
  EXPECT_TRUE(discrepancy_stop(1.5 * 0.1, 1.5, 0.1));
  EXPECT_FALSE(discrepancy_stop(0.2, 1.5, 0.1));
  EXPECT_FALSE(discrepancy_stop(0.0, 1.5, 0.0));
  EXPECT_THROW(discrepancy_stop(0.0, 1.0, 0.1), ConfigError);
  EXPECT_THROW(discrepancy_stop(0.0, 1.5, -0.1), ConfigError);
}

TEST(Config, Validation) {
  SolverConfig c;
  EXPECT_NO_THROW(validate(c));
  c.tau = 1.0;
  EXPECT_THROW(validate(c), ConfigError);
  c = SolverConfig{};
  c.lambda = -1.0;
  EXPECT_THROW(validate(c), ConfigError);
  c = SolverConfig{};
  c.norm_iters = 0;
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(Landweber, ZeroData) {
  const Problem p(16);
  SolverConfig c;
  c.n_max = 5;
  const Reconstruction r = landweber(Sinogram::zeros(p.geometry), p.wave, p.kernel, c);
  EXPECT_EQ(r.image, SourceImage::zeros(p.geometry));
  ASSERT_EQ(r.trace.residuals.size(), 6u);
  for (double v : r.trace.residuals) EXPECT_EQ(v, 0.0);
}

TEST(Landweber, OneStepUnrolling) {
  const Problem p(32);
  const Sinogram g = forward_W_alpha(p.wave, p.kernel, p.disc());
  SolverConfig c;
  c.lambda = 0.37 / std::pow(estimate_operator_norm(p.op, 10, 1), 2);
  c.n_max = 1;
  c.project = false;
  const Reconstruction r = landweber(g, p.wave, p.kernel, c);
  const SourceImage expected = adjoint_W_alpha(p.wave, p.kernel, g);
  for (std::size_t i = 0; i < expected.values.size(); ++i)
    EXPECT_NEAR(r.image.values.flat()[i], *c.lambda * expected.values.flat()[i],
                1e-13 * std::abs(*c.lambda * expected.values.flat()[i]) + 1e-300);
  EXPECT_EQ(r.trace.iterations(), 1u);
}

TEST(Landweber, UnprojectedResidualsDecrease) {
  const Problem p(64);
  const Sinogram g = forward_W_alpha(p.wave, p.kernel, p.disc());
  SolverConfig c;
  c.n_max = 20;
  c.project = false;
  const Reconstruction r = landweber(g, p.wave, p.kernel, c);
  const auto& res = r.trace.residuals;
  ASSERT_EQ(res.size(), 21u);
  for (std::size_t n = 0; n + 1 < res.size(); ++n) EXPECT_LT(res[n + 1], res[n]) << n;
  EXPECT_LT(res.back(), 0.1 * res.front());
  EXPECT_GT(r.trace.operator_norm, 0.0);
  EXPECT_NEAR(r.trace.lambda, 0.9 / std::pow(r.trace.operator_norm, 2), 1e-15 * r.trace.lambda);
}

TEST(Landweber, ProjectedIteratesNonnegative) {
  const Problem p(32);
  const Sinogram g = forward_W_alpha(p.wave, p.kernel, p.disc());
  SolverConfig c;
  c.n_max = 3;
  c.project = true;
  const Reconstruction r = landweber(g, p.wave, p.kernel, c);
  for (double v : r.image.values.flat()) EXPECT_GE(v, 0.0);
}

TEST(Landweber, StopsImmediatelyForLargeDelta) {
  const Problem p(32);
  const Sinogram g = forward_W_alpha(p.wave, p.kernel, p.disc());
  SolverConfig c;
  c.n_max = 10;
  c.delta = data_norm(p.geometry, g);
  const Reconstruction r = landweber(g, p.wave, p.kernel, c);
  ASSERT_TRUE(r.trace.stopped_at.has_value());
  EXPECT_EQ(*r.trace.stopped_at, 0u);
  EXPECT_EQ(r.trace.iterations(), 0u);
  EXPECT_EQ(r.image, SourceImage::zeros(p.geometry));
}

TEST(Landweber, DiscrepancyStopsOnNoisyData) {
  const Problem p(32);
  const Sinogram clean = forward_W_alpha(p.wave, p.kernel, p.disc());
  const NoisyData noisy = add_noise(clean, 0.05, 4);
  SolverConfig c;
  c.n_max = 2000;
  c.delta = noisy.delta * std::sqrt(p.geometry.data_weight());
  const Reconstruction r = landweber(noisy.data, p.wave, p.kernel, c);
  ASSERT_TRUE(r.trace.stopped_at.has_value());
  EXPECT_LT(r.trace.iterations(), c.n_max);
  EXPECT_LE(r.trace.residuals.back(), c.tau * c.delta);
  EXPECT_GT(r.trace.residuals[r.trace.iterations() - 1], c.tau * c.delta);
}

TEST(Landweber, DivergenceIsReported) {
  const testing::DenseMap one(Eigen::MatrixXd::Identity(1, 1));
  const std::vector<double> g{1.0};
  SolverConfig c;
  c.lambda = 1e3;
  c.n_max = 1000;
  c.project = false;
  EXPECT_THROW(landweber(one, g, c), NumericalError);
}

TEST(Landweber, Deterministic) {
  const Problem p(32);
  const Sinogram g = forward_W_alpha(p.wave, p.kernel, p.disc());
  SolverConfig c;
  c.n_max = 4;
  const Reconstruction a = landweber(g, p.wave, p.kernel, c);
  const Reconstruction b = landweber(g, p.wave, p.kernel, c);
  EXPECT_EQ(a.image, b.image);
  EXPECT_EQ(a.trace.residuals, b.trace.residuals);
}

TEST(Landweber, TraceCsv) {
  IterationTrace t;
  t.residuals = {2.0, 1.0};
  t.seconds = {0.0, 0.5};
  std::ostringstream os;
  write_trace_csv(os, t);
  std::istringstream is(os.str());
  std::string header, row0, row1;
  std::getline(is, header);
  std::getline(is, row0);
  std::getline(is, row1);
  EXPECT_EQ(header, "iter,residual,seconds");
  EXPECT_EQ(row0.substr(0, 2), "0,");
  EXPECT_EQ(row1.substr(0, 2), "1,");
}

}  // namespace
}  // namespace pat
