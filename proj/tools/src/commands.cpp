#include "pat/cli/commands.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <variant>

#include "pat/error.hpp"
#include "pat/io/array_file.hpp"
#include "pat/io/graymap.hpp"
#include "pat/kernel.hpp"
#include "pat/phantom.hpp"
#include "pat/solver.hpp"
#include "pat/wave.hpp"

namespace pat::cli {
namespace {

namespace fs = std::filesystem;

constexpr std::size_t kProbeSize = 16;
constexpr double kAdjointTol = 1e-10;
constexpr double kKramersKronigTol = 0.05;
constexpr double kIdentityTol = 1e-10;
constexpr double kNormTol = 0.01;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DomainError("cannot create directory " + dir.string() + ": " + ec.message());
}

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

// Geometry of the manifest at the reduced probe size.
ScanGeometry probe_geometry(const io::Manifest& m) {
  GeometryParams p = m.geometry;
  if (p.final_time) {
    const double scale = *p.final_time / (2.0 * p.radius / p.sound_speed);
    p.final_time = scale * 2.0 * p.radius / p.sound_speed;
  }
  p.nx = p.nt = p.nphi = kProbeSize;
  return ScanGeometry(p);
}

using DenseMatrix = Eigen::MatrixXd;

DenseMatrix probe(const LinearMap& op, bool adjoint) {
  const std::size_t in = adjoint ? op.range_size() : op.domain_size();
  const std::size_t out = adjoint ? op.domain_size() : op.range_size();
  DenseMatrix a(out, in);
  std::vector<double> e(in, 0.0), col(out);
  for (std::size_t j = 0; j < in; ++j) {
    e[j] = 1.0;
    if (adjoint) op.apply_adjoint(e, col);
    else op.apply(e, col);
    e[j] = 0.0;
    for (std::size_t i = 0; i < out; ++i) a(i, j) = col[i];
  }
  return a;
}

// ||B - (w_d / w_i) W^T||_F / ||B||_F for the probed pair.
double adjoint_deviation(const LinearMap& op) {
  const DenseMatrix w = probe(op, false);
  const DenseMatrix b = probe(op, true);
  const double ratio = op.range_weight() / op.domain_weight();
  const double denom = b.norm();
  const double diff = (b - ratio * w.transpose()).norm();
  return denom > 0.0 ? diff / denom : diff;
}

double reference_frequency(const io::Manifest& m) {
  switch (m.law.type) {
    case io::LawType::Ksb:
    case io::LawType::Nsw:
      return 1.0 / m.law.tau1;
    default:
      return 1.0;
  }
}

int check_adjoint(const io::Manifest& m, std::ostream& log) {
  const ScanGeometry g = probe_geometry(m);
  const WaveOperator wave(g, m.angular_oversampling);
  const KernelMatrix zero = build_kernel_matrix(AttenuationLaw::zero(), g.temporal_grid(), g.sound_speed());
  const KernelMatrix kernel = build_kernel_matrix(m.attenuation_law(), g.temporal_grid(), g.sound_speed());
  const double dev_w = adjoint_deviation(AttenuatedWaveOperator(wave, zero));
  const double dev_wa = adjoint_deviation(AttenuatedWaveOperator(wave, kernel));
  const bool ok = dev_w < kAdjointTol && dev_wa < kAdjointTol;
  log << verdict(dev_w < kAdjointTol) << " adjoint W        N=" << kProbeSize
      << " deviation=" << dev_w << '\n';
  log << verdict(dev_wa < kAdjointTol) << " adjoint W_alpha  N=" << kProbeSize
      << " law=" << m.attenuation_law().tag() << " deviation=" << dev_wa << '\n';
  return ok ? kExitOk : kExitCheckFailed;
}

int check_kk(const io::Manifest& m, std::ostream& log) {
  const AttenuationLaw law = m.attenuation_law();
  const double w0 = reference_frequency(m);
  const FrequencyGrid grid = FrequencyGrid::symmetric(4096, 64.0 * w0);
  const KramersKronigReport r = kramers_kronig_residual(law, grid, w0);
  const bool ok = r.residual < kKramersKronigTol;
  log << verdict(ok) << " kramers-kronig law=" << law.tag() << " residual=" << r.residual
      << (r.absolute ? " (absolute)" : "") << " omega0=" << r.omega0 << '\n';
  const double sym = check_hermitian_symmetry(law, grid);
  log << verdict(sym <= 1e-12) << " hermitian symmetry deviation=" << sym << '\n';
  return ok && sym <= 1e-12 ? kExitOk : kExitCheckFailed;
}

int check_kernel(const io::Manifest& m, std::ostream& log) {
  const ScanGeometry g = m.scan_geometry();
  const AttenuationLaw law = m.attenuation_law();
  const KernelMatrix k = build_kernel_matrix(law, g.temporal_grid(), g.sound_speed());
  bool ok = true;

  const bool finite = std::all_of(k.m.flat().begin(), k.m.flat().end(),
                                  [](double v) { return std::isfinite(v); });
  log << verdict(finite) << " kernel entries finite (" << k.m.rows() << "x" << k.m.cols() << ")\n";
  ok = ok && finite;

  bool causal = true;
  for (std::size_t l = 0; l < k.m.rows(); ++l)
    for (std::size_t lp = l + 1; lp < k.m.cols(); ++lp) causal = causal && k.m(l, lp) == 0.0;
  log << verdict(causal) << " kernel causal (zero above the diagonal)\n";
  ok = ok && causal;

  Sinogram probe_data = Sinogram::zeros(g);
  for (std::size_t l = 0; l < g.time_samples(); ++l)
    probe_data.values(0, l) = std::sin(0.37 * static_cast<double>(l)) + 0.1 * static_cast<double>(l % 5);
  const Sinogram mapped = apply_M(k, probe_data);
  const Sinogram back = apply_M_adjoint(k, mapped);
  const double lhs = dot(mapped.values.flat(), mapped.values.flat());
  const double rhs = dot(probe_data.values.flat(), back.values.flat());
  const double adj = std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300);
  log << verdict(adj < kAdjointTol) << " <M g, M g> = <g, M^* M g> deviation=" << adj << '\n';
  ok = ok && adj < kAdjointTol;

  if (law.is_zero()) {
    double diff = 0.0;
    for (std::size_t i = 0; i < mapped.values.size(); ++i)
      diff = std::max(diff, std::abs(mapped.values.flat()[i] - probe_data.values.flat()[i]));
    const double rel = diff / norm2(probe_data.values.flat());
    log << verdict(rel < kIdentityTol) << " identity reduction deviation=" << rel << '\n';
    ok = ok && rel < kIdentityTol;
  } else {
    const std::size_t n = k.m.cols();
    const std::size_t c1 = n / 5, c2 = (4 * n) / 5;
    log << "     support width column " << c1 << ": " << support_width(kernel_column(k, c1))
        << ", column " << c2 << ": " << support_width(kernel_column(k, c2)) << '\n';
  }
  return ok ? kExitOk : kExitCheckFailed;
}

int check_norm(const io::Manifest& m, std::ostream& log) {
  const ScanGeometry g = probe_geometry(m);
  const WaveOperator wave(g, m.angular_oversampling);
  const KernelMatrix kernel = build_kernel_matrix(m.attenuation_law(), g.temporal_grid(), g.sound_speed());
  const AttenuatedWaveOperator op(wave, kernel);
  const DenseMatrix w = probe(op, false);
  const double sigma = Eigen::JacobiSVD<DenseMatrix>(w).singularValues()(0) *
                       std::sqrt(op.range_weight() / op.domain_weight());
  const double est = estimate_operator_norm(op, 50, m.solver.seed);
  const double rel = std::abs(est - sigma) / sigma;
  const bool ok = rel < kNormTol;
  log << verdict(ok) << " operator norm N=" << kProbeSize << " power=" << est
      << " svd=" << sigma << " relative difference=" << rel << '\n';
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

Array2D decimate_time(const Array2D& fine, std::size_t factor) {
  if (factor == 0) throw DomainError("decimate_time: factor must be >= 1");
  if (factor == 1) return fine;
  const std::size_t nf = fine.cols();
  if (nf < 2 || (nf - 1) % factor != 0)
    throw DomainError("decimate_time: row length must be factor * n + 1");
  const std::size_t nc = (nf - 1) / factor + 1;

  const auto half = static_cast<std::ptrdiff_t>(8 * factor);
  std::vector<double> taps(static_cast<std::size_t>(2 * half + 1));
  double sum = 0.0;
  for (std::ptrdiff_t n = -half; n <= half; ++n) {
    const double x = static_cast<double>(n) / static_cast<double>(factor);
    const double sinc = n == 0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    const double window =
        0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(n) / static_cast<double>(half + 1)));
    taps[static_cast<std::size_t>(n + half)] = sinc * window;
    sum += sinc * window;
  }
  for (double& t : taps) t /= sum;

  // Even reflection about both end samples.
  const auto last = static_cast<std::ptrdiff_t>(nf - 1);
  auto reflect = [last](std::ptrdiff_t i) {
    while (i < 0 || i > last) {
      if (i < 0) i = -i;
      if (i > last) i = 2 * last - i;
    }
    return i;
  };

  Array2D out(fine.rows(), nc);
  for (std::size_t k = 0; k < fine.rows(); ++k) {
    const auto row = fine.row(k);
    for (std::size_t l = 0; l < nc; ++l) {
      const auto centre = static_cast<std::ptrdiff_t>(l * factor);
      double acc = 0.0;
      for (std::ptrdiff_t n = -half; n <= half; ++n)
        acc += taps[static_cast<std::size_t>(n + half)] *
               row[static_cast<std::size_t>(reflect(centre - n))];
      out(k, l) = acc;
    }
  }
  return out;
}

Simulation simulate(const io::Manifest& manifest, std::size_t oversample) {
  if (oversample == 0) throw ConfigError("oversampling factor must be >= 1");
  const ScanGeometry g = manifest.scan_geometry();
  const ScanGeometry fine = g.with_time_oversampling(oversample);
  const AttenuationLaw law = manifest.attenuation_law();

  Simulation sim;
  sim.truth = rasterize(manifest.phantom, g);
  const WaveOperator wave(fine, manifest.angular_oversampling);
  const KernelMatrix kernel = build_kernel_matrix(law, fine.temporal_grid(), fine.sound_speed());
  const Sinogram fine_data = forward_W_alpha(wave, kernel, sim.truth);

  Sinogram coarse(decimate_time(fine_data.values, oversample));
  coarse = apply_limited_view(g, std::move(coarse), g.params().arcs);
  NoisyData noisy = add_noise(g, coarse, manifest.noise.level, manifest.noise.seed);
  sim.data = apply_limited_view(g, std::move(noisy.data), g.params().arcs);
  sim.delta = noisy.delta;
  sim.delta_weighted = noisy.delta * std::sqrt(g.data_weight());
  return sim;
}

int cmd_simulate(const io::Manifest& manifest, const fs::path& out_dir, std::size_t oversample,
                 std::ostream& log) {
  const ScanGeometry g = manifest.scan_geometry();
  if (auto w = g.sampling_warning()) log << "warning: " << *w << '\n';
  const Simulation sim = simulate(manifest, oversample);
  ensure_dir(out_dir);
  io::write_array(out_dir / "data.arr", sim.data.values);
  io::write_array(out_dir / "truth.arr", sim.truth.values);
  io::Manifest echo = manifest;
  echo.oversample = oversample;
  echo.solver.delta = sim.delta_weighted;
  io::write_manifest(out_dir / "manifest.txt", echo);
  log << "simulate: law=" << manifest.attenuation_law().tag() << " data " << g.nphi() << "x"
      << g.time_samples() << " oversample=" << oversample
      << " delta=" << sim.delta_weighted << " (weighted), " << sim.delta << " (euclidean)\n";
  return kExitOk;
}

int cmd_reconstruct(const io::Manifest& manifest, const fs::path& data_path,
                    const fs::path& out_dir, bool image, std::ostream& log) {
  const ScanGeometry g = manifest.scan_geometry();
  Sinogram data(io::read_array2d(data_path));
  if (data.values.rows() != g.nphi() || data.values.cols() != g.time_samples())
    throw ConfigError("data is " + std::to_string(data.values.rows()) + "x" +
                      std::to_string(data.values.cols()) + ", manifest expects " +
                      std::to_string(g.nphi()) + "x" + std::to_string(g.time_samples()));
  const WaveOperator wave(g, manifest.angular_oversampling);
  const KernelMatrix kernel =
      build_kernel_matrix(manifest.attenuation_law(), g.temporal_grid(), g.sound_speed());
  const Reconstruction rec = landweber(data, wave, kernel, manifest.solver);

  ensure_dir(out_dir);
  io::write_array(out_dir / "recon.arr", rec.image.values);
  {
    std::ofstream csv(out_dir / "trace.csv", std::ios::trunc);
    write_trace_csv(csv, rec.trace);
  }
  if (image) io::write_graymap(out_dir / "recon.pgm", rec.image.values);
  log << "reconstruct: iterations=" << rec.trace.iterations() << " lambda=" << rec.trace.lambda
      << " residual " << rec.trace.residuals.front() << " -> " << rec.trace.residuals.back();
  if (rec.trace.stopped_at) log << " (discrepancy stop at n=" << *rec.trace.stopped_at << ")";
  log << '\n';
  return kExitOk;
}

int cmd_check(const io::Manifest& manifest, const std::string& which, std::ostream& log) {
  if (which == "adjoint") return check_adjoint(manifest, log);
  if (which == "kk") return check_kk(manifest, log);
  if (which == "kernel") return check_kernel(manifest, log);
  if (which == "norm") return check_norm(manifest, log);
  log << "unknown check '" << which << "' (expected adjoint, kk, kernel or norm)\n";
  return kExitUsage;
}

int cmd_kernel_dump(const io::Manifest& manifest, const fs::path& out_dir, bool image,
                    std::ostream& log) {
  const ScanGeometry g = manifest.scan_geometry();
  const KernelMatrix k =
      build_kernel_matrix(manifest.attenuation_law(), g.temporal_grid(), g.sound_speed());
  ensure_dir(out_dir);
  io::write_array(out_dir / "kernel.arr", k.m);
  if (image) io::write_graymap(out_dir / "kernel.pgm", k.m);
  log << "kernel-dump: law=" << k.law_tag << " size " << k.m.rows() << "x" << k.m.cols() << '\n';
  return kExitOk;
}

int run_guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace pat::cli
