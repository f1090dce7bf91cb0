#include <CLI11.hpp>

#include <iostream>

#include "pat/cli/commands.hpp"
#include "pat/io/manifest.hpp"
#include "pat/parallel.hpp"

int main(int argc, char** argv) {
  namespace cli = pat::cli;
  CLI::App app{"Photoacoustic reconstruction in attenuating media"};
  app.require_subcommand(1);

  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");

  std::string manifest_path;
  std::string out_dir = ".";
  std::string data_path;
  std::size_t oversample = 0;
  bool image = false;
  std::string which;

  auto* simulate = app.add_subcommand("simulate", "Simulate attenuated data from a phantom");
  simulate->add_option("--manifest", manifest_path, "Manifest file")->required();
  simulate->add_option("--out", out_dir, "Output directory");
  simulate->add_option("--oversample", oversample, "Temporal oversampling factor (overrides manifest)")
      ->check(CLI::PositiveNumber);

  auto* reconstruct = app.add_subcommand("reconstruct", "Projected Landweber reconstruction");
  reconstruct->add_option("--manifest", manifest_path, "Manifest file")->required();
  reconstruct->add_option("--data", data_path, "Sinogram array file")->required();
  reconstruct->add_option("--out", out_dir, "Output directory");
  reconstruct->add_flag("--image", image, "Also write recon.pgm");

  auto* check = app.add_subcommand("check", "Run a diagnostic check");
  check->add_option("which", which, "adjoint, kk, kernel or norm")
      ->required()
      ->check(CLI::IsMember({"adjoint", "kk", "kernel", "norm"}));
  check->add_option("--manifest", manifest_path, "Manifest file")->required();

  auto* dump = app.add_subcommand("kernel-dump", "Write the attenuation kernel matrix");
  dump->add_option("--manifest", manifest_path, "Manifest file")->required();
  dump->add_option("--out", out_dir, "Output directory");
  dump->add_flag("--image", image, "Also write kernel.pgm");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitUsage;
  }

  if (threads > 0) pat::set_thread_count(threads);

  return cli::run_guarded(
      [&]() -> int {
        const pat::io::Manifest m = pat::io::read_manifest(manifest_path);
        if (*simulate)
          return cli::cmd_simulate(m, out_dir, oversample > 0 ? oversample : m.oversample, std::cout);
        if (*reconstruct) return cli::cmd_reconstruct(m, data_path, out_dir, image, std::cout);
        if (*check) return cli::cmd_check(m, which, std::cout);
        return cli::cmd_kernel_dump(m, out_dir, image, std::cout);
      },
      std::cerr);
}
