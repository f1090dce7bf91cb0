#pragma once

// Manifests shared by the end-to-end tests and the acceptance suite.

#include <cmath>
#include <numbers>

#include "pat/geometry.hpp"
#include "pat/io/manifest.hpp"
#include "pat/phantom.hpp"

namespace pat::testing {

/// Strong attenuation: R = 5 cm, c0 = 1540 m/s, NSW with c_inf = 1623 m/s
/// and tau1 = 100 ns, T = 2R/c0, N_x = N_t = N_phi = n. Off-centre disc
/// plus annulus, noise-free, 2x temporal oversampling.
inline io::Manifest case1_manifest(std::size_t n = 128) {
  io::Manifest m;
  m.geometry.radius = 0.05;
  m.geometry.sound_speed = 1540.0;
  m.geometry.nx = m.geometry.nt = m.geometry.nphi = n;
  m.law.type = io::LawType::Nsw;
  m.law.c_inf = 1623.0;
  m.law.tau1 = 100e-9;
  m.phantom.primitives = {
      Primitive::disc({0.015, -0.012}, 0.010, 1.0),
      Primitive::annulus({-0.012, 0.012}, 0.010, 0.016, 1.0),
  };
  m.solver.n_max = 10;
  m.solver.tau = 1.5;
  m.solver.project = true;
  m.solver.norm_iters = 30;
  m.solver.seed = 7;
  m.noise.level = 0.0;
  m.noise.seed = 11;
  m.oversample = 2;
  return m;
}

/// Weak attenuation: R = 5 mm, tau1 = 1 ns.
inline io::Manifest case2_manifest(std::size_t n = 128) {
  io::Manifest m = case1_manifest(n);
  m.geometry.radius = 0.005;
  m.law.tau1 = 1e-9;
  for (Primitive& p : m.phantom.primitives) {
    p.center.x *= 0.1;
    p.center.y *= 0.1;
    p.radius_a *= 0.1;
    p.radius_b *= 0.1;
  }
  return m;
}

inline double relative_error(const SourceImage& x, const SourceImage& truth) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.values.size(); ++i) {
    const double d = x.values.flat()[i] - truth.values.flat()[i];
    num += d * d;
    den += truth.values.flat()[i] * truth.values.flat()[i];
  }
  return std::sqrt(num / den);
}

}  // namespace pat::testing
