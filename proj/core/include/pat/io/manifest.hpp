#pragma once

// Plain-text run description. One "key = value" per line, '#' starts a
// comment. Repeatable keys: phantom, view.arc.
//
//   geometry.R  geometry.c0  geometry.N  geometry.N_x  geometry.N_t
//   geometry.N_phi  geometry.T (seconds or "2R/c0")
//   law.type (zero|power|ksb|nsw)  law.a0  law.b0  law.gamma  law.c_inf  law.tau1
//   phantom = disc cx cy r amp | annulus cx cy r_in r_out amp
//           | ellipse cx cy a b rotation amp
//   solver.lambda (auto|value)  solver.n_max  solver.tau  solver.delta
//   solver.project (true|false)  solver.norm_iters  solver.seed
//   noise.level  noise.seed  noise.rng (splitmix64)
//   view.arc (full | lo hi), angles in radians; "pi", "2pi", "pi/2",
//            "0.5*pi" accepted
//   simulate.oversample  wave.angular_oversampling (N_beta / N_phi)

#include <cstdint>
#include <filesystem>
#include <string>

#include "pat/attenuation.hpp"
#include "pat/geometry.hpp"
#include "pat/phantom.hpp"
#include "pat/solver.hpp"

namespace pat::io {

enum class LawType { Zero, Power, Ksb, Nsw };

/// Law parameters as written; the NSW low-frequency speed is geometry.c0.
struct LawSpec {
  LawType type = LawType::Zero;
  double a0 = 0.0;
  double b0 = 0.0;
  double gamma = 1.5;
  double c_inf = 1623.0;
  double tau1 = 1e-7;
};

struct NoiseSpec {
  double level = 0.0;
  std::uint64_t seed = 1;
};

struct Manifest {
  GeometryParams geometry;
  LawSpec law;
  PhantomSpec phantom;
  SolverConfig solver;
  NoiseSpec noise;
  std::size_t oversample = 2;
  std::size_t angular_oversampling = kDefaultAngularOversampling;

  ScanGeometry scan_geometry() const { return ScanGeometry(geometry); }
  /// Throws ConfigError for invalid parameters.
  AttenuationLaw attenuation_law() const;
};

/// Throws FormatError carrying the 1-based line number for malformed lines,
/// unknown keys and invalid values.
Manifest parse_manifest(const std::string& text);
Manifest read_manifest(const std::filesystem::path& path);

/// Round-trips through parse_manifest. Doubles use 17 significant digits.
std::string serialize_manifest(const Manifest& m);
void write_manifest(const std::filesystem::path& path, const Manifest& m);

/// Parses an angle token such as "1.2", "pi", "2pi", "pi/2" or "0.5*pi".
double parse_angle(const std::string& token);

std::string law_type_name(LawType t);

}  // namespace pat::io
