#include "pat/io/manifest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

#include "pat/error.hpp"

namespace pat::io {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || !std::isfinite(v))
    throw ConfigError("expected a finite number, got '" + s + "'");
  return v;
}

std::uint64_t to_uint(const std::string& s) {
  std::uint64_t v = 0;
  const char* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) throw ConfigError("expected a non-negative integer, got '" + s + "'");
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw ConfigError("expected true or false, got '" + s + "'");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void apply_phantom(Manifest& m, const std::string& value) {
  const auto t = split_ws(value);
  if (t.empty()) throw ConfigError("phantom: missing shape");
  auto need = [&](std::size_t n) {
    if (t.size() != n + 1)
      throw ConfigError("phantom " + t[0] + ": expected " + std::to_string(n) + " numbers");
  };
  std::vector<double> v;
  for (std::size_t i = 1; i < t.size(); ++i) v.push_back(to_double(t[i]));
  if (t[0] == "disc") {
    need(4);
    m.phantom.primitives.push_back(Primitive::disc({v[0], v[1]}, v[2], v[3]));
  } else if (t[0] == "annulus") {
    need(5);
    m.phantom.primitives.push_back(Primitive::annulus({v[0], v[1]}, v[2], v[3], v[4]));
  } else if (t[0] == "ellipse") {
    need(6);
    m.phantom.primitives.push_back(Primitive::ellipse({v[0], v[1]}, v[2], v[3], v[4], v[5]));
  } else {
    throw ConfigError("phantom: unknown shape '" + t[0] + "'");
  }
}

void apply_arc(Manifest& m, const std::string& value) {
  const auto t = split_ws(value);
  if (t.size() == 1 && t[0] == "full") {
    m.geometry.arcs.clear();
    return;
  }
  if (t.size() != 2) throw ConfigError("view.arc: expected 'full' or 'lo hi'");
  const DetectorArc arc{parse_angle(t[0]), parse_angle(t[1])};
  if (arc.lo > arc.hi) throw ConfigError("view.arc: lo must not exceed hi");
  m.geometry.arcs.push_back(arc);
}

void apply(Manifest& m, const std::string& key, const std::string& value) {
  auto& g = m.geometry;
  if (key == "geometry.R") g.radius = to_double(value);
  else if (key == "geometry.c0") g.sound_speed = to_double(value);
  else if (key == "geometry.N") g.nx = g.nt = g.nphi = to_uint(value);
  else if (key == "geometry.N_x") g.nx = to_uint(value);
  else if (key == "geometry.N_t") g.nt = to_uint(value);
  else if (key == "geometry.N_phi") g.nphi = to_uint(value);
  else if (key == "geometry.T") {
    if (value == "2R/c0") g.final_time.reset();
    else g.final_time = to_double(value);
  } else if (key == "law.type") {
    if (value == "zero") m.law.type = LawType::Zero;
    else if (value == "power") m.law.type = LawType::Power;
    else if (value == "ksb") m.law.type = LawType::Ksb;
    else if (value == "nsw") m.law.type = LawType::Nsw;
    else throw ConfigError("law.type: unknown law '" + value + "'");
  } else if (key == "law.a0") m.law.a0 = to_double(value);
  else if (key == "law.b0") m.law.b0 = to_double(value);
  else if (key == "law.gamma") m.law.gamma = to_double(value);
  else if (key == "law.c_inf") m.law.c_inf = to_double(value);
  else if (key == "law.tau1") m.law.tau1 = to_double(value);
  else if (key == "phantom") apply_phantom(m, value);
  else if (key == "solver.lambda") {
    if (value == "auto") m.solver.lambda.reset();
    else m.solver.lambda = to_double(value);
  } else if (key == "solver.n_max") m.solver.n_max = to_uint(value);
  else if (key == "solver.tau") m.solver.tau = to_double(value);
  else if (key == "solver.delta") m.solver.delta = to_double(value);
  else if (key == "solver.project") m.solver.project = to_bool(value);
  else if (key == "solver.norm_iters") m.solver.norm_iters = to_uint(value);
  else if (key == "solver.seed") m.solver.seed = to_uint(value);
  else if (key == "noise.level") m.noise.level = to_double(value);
  else if (key == "noise.seed") m.noise.seed = to_uint(value);
  else if (key == "noise.rng") {
    if (value != "splitmix64") throw ConfigError("noise.rng: only splitmix64 is supported");
  } else if (key == "view.arc") apply_arc(m, value);
  else if (key == "simulate.oversample") {
    m.oversample = to_uint(value);
    if (m.oversample < 1) throw ConfigError("simulate.oversample must be >= 1");
  } else if (key == "wave.angular_oversampling") {
    m.angular_oversampling = to_uint(value);
    if (m.angular_oversampling < 1) throw ConfigError("wave.angular_oversampling must be >= 1");
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

}  // namespace

double parse_angle(const std::string& token) {
  const auto pos = token.find("pi");
  if (pos == std::string::npos) return to_double(token);
  std::string factor = token.substr(0, pos);
  std::string rest = token.substr(pos + 2);
  if (!factor.empty() && factor.back() == '*') factor.pop_back();
  double v = std::numbers::pi * (factor.empty() ? 1.0 : to_double(factor));
  if (!rest.empty()) {
    if (rest[0] != '/') throw ConfigError("bad angle '" + token + "'");
    const double d = to_double(rest.substr(1));
    if (d == 0.0) throw ConfigError("bad angle '" + token + "'");
    v /= d;
  }
  return v;
}

std::string law_type_name(LawType t) {
  switch (t) {
    case LawType::Zero: return "zero";
    case LawType::Power: return "power";
    case LawType::Ksb: return "ksb";
    case LawType::Nsw: return "nsw";
  }
  return "zero";
}

AttenuationLaw Manifest::attenuation_law() const {
  switch (law.type) {
    case LawType::Zero: return AttenuationLaw::zero();
    case LawType::Power: return AttenuationLaw(PowerLaw{law.a0, law.b0, law.gamma});
    case LawType::Ksb:
      return AttenuationLaw(KsbLaw{law.a0, law.b0, law.c_inf, law.tau1, law.gamma});
    case LawType::Nsw: return AttenuationLaw(NswLaw{geometry.sound_speed, law.c_inf, law.tau1});
  }
  return AttenuationLaw::zero();
}

Manifest parse_manifest(const std::string& text) {
  Manifest m;
  std::istringstream is(text);
  int line_no = 0;
  for (std::string line; std::getline(is, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos)
      throw FormatError("line " + std::to_string(line_no) + ": expected 'key = value'", line_no);
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    if (key.empty() || value.empty())
      throw FormatError("line " + std::to_string(line_no) + ": empty key or value", line_no);
    try {
      apply(m, key, value);
    } catch (const ConfigError& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
  }
  return m;
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open manifest " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_manifest(ss.str());
}

std::string serialize_manifest(const Manifest& m) {
  std::ostringstream os;
  const auto& g = m.geometry;
  os << "geometry.R = " << fmt(g.radius) << '\n'
     << "geometry.c0 = " << fmt(g.sound_speed) << '\n'
     << "geometry.N_x = " << g.nx << '\n'
     << "geometry.N_t = " << g.nt << '\n'
     << "geometry.N_phi = " << g.nphi << '\n'
     << "geometry.T = " << (g.final_time ? fmt(*g.final_time) : std::string("2R/c0")) << '\n';
  os << "law.type = " << law_type_name(m.law.type) << '\n'
     << "law.a0 = " << fmt(m.law.a0) << '\n'
     << "law.b0 = " << fmt(m.law.b0) << '\n'
     << "law.gamma = " << fmt(m.law.gamma) << '\n'
     << "law.c_inf = " << fmt(m.law.c_inf) << '\n'
     << "law.tau1 = " << fmt(m.law.tau1) << '\n';
  for (const Primitive& p : m.phantom.primitives) {
    os << "phantom = ";
    switch (p.shape) {
      case Shape::Disc:
        os << "disc " << fmt(p.center.x) << ' ' << fmt(p.center.y) << ' ' << fmt(p.radius_a);
        break;
      case Shape::Annulus:
        os << "annulus " << fmt(p.center.x) << ' ' << fmt(p.center.y) << ' ' << fmt(p.radius_a)
           << ' ' << fmt(p.radius_b);
        break;
      case Shape::Ellipse:
        os << "ellipse " << fmt(p.center.x) << ' ' << fmt(p.center.y) << ' ' << fmt(p.radius_a)
           << ' ' << fmt(p.radius_b) << ' ' << fmt(p.rotation);
        break;
    }
    os << ' ' << fmt(p.amplitude) << '\n';
  }
  const auto& s = m.solver;
  os << "solver.lambda = " << (s.lambda ? fmt(*s.lambda) : std::string("auto")) << '\n'
     << "solver.n_max = " << s.n_max << '\n'
     << "solver.tau = " << fmt(s.tau) << '\n'
     << "solver.delta = " << fmt(s.delta) << '\n'
     << "solver.project = " << (s.project ? "true" : "false") << '\n'
     << "solver.norm_iters = " << s.norm_iters << '\n'
     << "solver.seed = " << s.seed << '\n';
  os << "noise.level = " << fmt(m.noise.level) << '\n'
     << "noise.seed = " << m.noise.seed << '\n'
     << "noise.rng = splitmix64\n";
  if (g.arcs.empty()) os << "view.arc = full\n";
  for (const DetectorArc& a : g.arcs) os << "view.arc = " << fmt(a.lo) << ' ' << fmt(a.hi) << '\n';
  os << "simulate.oversample = " << m.oversample << '\n'
     << "wave.angular_oversampling = " << m.angular_oversampling << '\n';
  return os.str();
}

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DomainError("cannot open " + path.string() + " for writing");
  os << serialize_manifest(m);
}

}  // namespace pat::io
