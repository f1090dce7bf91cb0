#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "pat/error.hpp"
#include "pat/phantom.hpp"

namespace pat {
namespace {

constexpr double kR = 0.05;
constexpr double kPi = std::numbers::pi;

ScanGeometry square(std::size_t n) { return ScanGeometry::square(kR, 1540.0, n); }

Sinogram random_sinogram(const ScanGeometry& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Sinogram s = Sinogram::zeros(g);
  for (double& v : s.values.flat()) v = normal(rng);
  return s;
}

double mean(const SourceImage& h) {
  double acc = 0.0;
  for (double v : h.values.flat()) acc += v;
  return acc / static_cast<double>(h.values.size());
}

TEST(Phantom, EmptySpecIsZero) {
  const ScanGeometry g = square(32);
  EXPECT_EQ(rasterize(PhantomSpec{}, g), SourceImage::zeros(g));
}

TEST(Phantom, DiscAreaRatio) {
  const ScanGeometry g = square(256);
  const SourceImage h = rasterize(PhantomSpec{{Primitive::disc({0.0, 0.0}, kR / 2.0)}}, g);
  EXPECT_NEAR(mean(h) / (kPi / 16.0), 1.0, 0.01);
}

TEST(Phantom, AdditiveOverDisjointPrimitives) {
  const ScanGeometry g = square(64);
  const Primitive a = Primitive::disc({0.015, 0.0}, 0.008, 1.5);
  const Primitive b = Primitive::ellipse({-0.015, 0.01}, 0.01, 0.004, 0.3, 0.7);
  const SourceImage both = rasterize(PhantomSpec{{a, b}}, g);
  const SourceImage ha = rasterize(PhantomSpec{{a}}, g), hb = rasterize(PhantomSpec{{b}}, g);
  for (std::size_t i = 0; i < both.values.size(); ++i)
    EXPECT_DOUBLE_EQ(both.values.flat()[i], ha.values.flat()[i] + hb.values.flat()[i]);
}

TEST(Phantom, ValuesBoundedByAmplitudes) {
  const ScanGeometry g = square(64);
  const PhantomSpec spec{{Primitive::disc({0.0, 0.0}, 0.02, 1.0),
                          Primitive::annulus({0.005, 0.0}, 0.005, 0.012, 0.5)}};
  const SourceImage h = rasterize(spec, g);
  for (double v : h.values.flat()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.5);
  }
  EXPECT_EQ(rasterize(spec, g), h);
}

TEST(Phantom, PrimitiveGeometry) {
  const Primitive ring = Primitive::annulus({0.0, 0.0}, 0.01, 0.02);
  EXPECT_FALSE(ring.contains(0.0, 0.0));
  EXPECT_TRUE(ring.contains(0.015, 0.0));
  EXPECT_FALSE(ring.contains(0.025, 0.0));
  const Primitive e = Primitive::ellipse({0.0, 0.0}, 0.02, 0.005, kPi / 2.0);
  EXPECT_TRUE(e.contains(0.0, 0.018));
  EXPECT_FALSE(e.contains(0.018, 0.0));
  EXPECT_DOUBLE_EQ(Primitive::disc({0.03, 0.04}, 0.01).extent(), 0.06);
}

TEST(Phantom, RejectsPrimitivesOutsideDisc) {
  EXPECT_THROW(validate(PhantomSpec{{Primitive::disc({0.04, 0.0}, 0.02)}}, kR), ConfigError);
  EXPECT_THROW(rasterize(PhantomSpec{{Primitive::disc({0.04, 0.0}, 0.02)}}, square(16)),
               ConfigError);
  EXPECT_THROW(validate(PhantomSpec{{Primitive::annulus({0.0, 0.0}, 0.02, 0.01)}}, kR),
               ConfigError);
  EXPECT_THROW(validate(PhantomSpec{{Primitive::disc({0.0, 0.0}, 0.01, NAN)}}, kR), ConfigError);
  EXPECT_NO_THROW(validate(PhantomSpec{{Primitive::disc({0.0, 0.0}, 0.01)}}, kR));
}

TEST(LimitedView, FullCircleUnchanged) {
  const ScanGeometry g = square(32);
  const Sinogram s = random_sinogram(g, 1);
  const std::vector<DetectorArc> full{{0.0, 2.0 * kPi}};
  EXPECT_EQ(apply_limited_view(g, s, full), s);
  EXPECT_EQ(apply_limited_view(g, s, {}), s);
}

TEST(LimitedView, HalfCircleCount) {
  const ScanGeometry g = square(128);
  const std::vector<DetectorArc> half{{0.0, kPi}};
  const Sinogram s = apply_limited_view(g, Sinogram(Array2D(g.nphi(), g.time_samples(), 1.0)), half);
  std::size_t active = 0;
  for (std::size_t k = 0; k < g.nphi(); ++k) active += s.values(k, 0) != 0.0;
  EXPECT_EQ(active, g.nphi() / 2 + 1);
  EXPECT_EQ(g.with_arcs(half).active_detectors(), g.nphi() / 2 + 1);
}

TEST(LimitedView, Idempotent) {
  const ScanGeometry g = square(32);
  const std::vector<DetectorArc> half{{0.0, kPi}};
  const Sinogram once = apply_limited_view(g, random_sinogram(g, 2), half);
  EXPECT_EQ(apply_limited_view(g, once, half), once);
}

TEST(Noise, ZeroLevelUnchanged) {
  const ScanGeometry g = square(32);
  const Sinogram s = random_sinogram(g, 3);
  const NoisyData n = add_noise(s, 0.0, 9);
  EXPECT_EQ(n.data, s);
  EXPECT_EQ(n.delta, 0.0);
}

TEST(Noise, ExactRelativeLevel) {
  const ScanGeometry g = square(32);
  const Sinogram s = random_sinogram(g, 4);
  const NoisyData n = add_noise(s, 0.02, 9);
  double diff = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    diff += std::pow(n.data.values.flat()[i] - s.values.flat()[i], 2);
    ref += std::pow(s.values.flat()[i], 2);
  }
  EXPECT_NEAR(std::sqrt(diff / ref), 0.02, 1e-12);
  EXPECT_NEAR(n.delta, 0.02 * std::sqrt(ref), 1e-12 * std::sqrt(ref));
}

TEST(Noise, DeterministicAndSeedDependent) {
  const ScanGeometry g = square(32);
  const Sinogram s = random_sinogram(g, 5);
  EXPECT_EQ(add_noise(s, 0.05, 17).data, add_noise(s, 0.05, 17).data);
  EXPECT_NE(add_noise(s, 0.05, 17).data, add_noise(s, 0.05, 18).data);
  EXPECT_EQ(gaussian_variate(3, 10), gaussian_variate(3, 10));
}

TEST(Noise, GaussianStatistics) {
  double sum = 0.0, sq = 0.0;
  const std::size_t n = 200000;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = gaussian_variate(42, i);
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(Noise, ActiveRowsOnly) {
  const ScanGeometry g = ScanGeometry::square(kR, 1540.0, 32, {{0.0, kPi}});
  const Sinogram s = apply_limited_view(g, random_sinogram(g, 6), g.params().arcs);
  const NoisyData n = add_noise(g, s, 0.02, 3);
  double diff = 0.0, ref = 0.0;
  for (std::size_t k = 0; k < g.nphi(); ++k) {
    for (std::size_t l = 0; l < g.time_samples(); ++l) {
      if (!g.detector_active(k)) {
        EXPECT_EQ(n.data.values(k, l), 0.0);
      }
      diff += std::pow(n.data.values(k, l) - s.values(k, l), 2);
      ref += std::pow(s.values(k, l), 2);
    }
  }
  EXPECT_NEAR(std::sqrt(diff / ref), 0.02, 1e-12);
}

TEST(Noise, RejectsNegativeLevel) {
  const ScanGeometry g = square(16);
  EXPECT_THROW(add_noise(Sinogram::zeros(g), -0.1, 1), ConfigError);
}

}  // namespace
}  // namespace pat
