#pragma once

// Subcommands of patrecon. Each returns the process exit code:
//   0 success, 1 check failure, 2 usage or input error, 3 numerical failure.
// Library exceptions are mapped to codes by run_guarded.

#include <filesystem>
#include <functional>
#include <ostream>
#include <string>

#include "pat/geometry.hpp"
#include "pat/io/manifest.hpp"

namespace pat::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

struct Simulation {
  SourceImage truth;
  Sinogram data;
  /// Euclidean norm of the added noise.
  double delta = 0.0;
  /// Same, in the weighted data norm used by the solver.
  double delta_weighted = 0.0;
};

/// Forward data on a temporal grid refined by `oversample`, decimated back
/// to the manifest grid, masked, with noise on the active detectors.
Simulation simulate(const io::Manifest& manifest, std::size_t oversample);

/// Low-pass (Hann-windowed sinc, cutoff pi/factor) and keep every
/// `factor`-th sample of each row. Rows must have factor * n + 1 samples.
Array2D decimate_time(const Array2D& fine, std::size_t factor);

int cmd_simulate(const io::Manifest& manifest, const std::filesystem::path& out_dir,
                 std::size_t oversample, std::ostream& log);
int cmd_reconstruct(const io::Manifest& manifest, const std::filesystem::path& data_path,
                    const std::filesystem::path& out_dir, bool image, std::ostream& log);
/// which: adjoint, kk, kernel or norm.
int cmd_check(const io::Manifest& manifest, const std::string& which, std::ostream& log);
int cmd_kernel_dump(const io::Manifest& manifest, const std::filesystem::path& out_dir,
                    bool image, std::ostream& log);

/// Runs `body`, translating pat exceptions into exit codes and messages.
int run_guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace pat::cli
