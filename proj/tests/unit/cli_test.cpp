#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <gtest/gtest.h>

#include "pat/cli/commands.hpp"
#include "pat/io/array_file.hpp"
#include "pat/kernel.hpp"
#include "scenarios.hpp"

namespace pat::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("pat_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_manifest(const std::string& name, const io::Manifest& m) {
    const fs::path p = dir_ / name;
    io::write_manifest(p, m);
    return p;
  }

  fs::path write_text(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  // Exit status of the command-line binary.
  static int run(const std::string& args) {
    const std::string cmd = std::string(PATRECON_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string bytes(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
  }

  fs::path dir_;
};

io::Manifest small(std::size_t n = 32) {
  io::Manifest m = testing::case1_manifest(n);
  m.noise.level = 0.02;
  return m;
}

TEST_F(CliTest, SimulateEmptyPhantomIsZero) {
  io::Manifest m = small();
  m.phantom.primitives.clear();
  const Simulation sim = simulate(m, 2);
  for (double v : sim.data.values.flat()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(sim.delta, 0.0);
}

TEST_F(CliTest, SimulateIsDeterministic) {
  const fs::path manifest = write_manifest("m.txt", small());
  ASSERT_EQ(run("simulate --manifest " + manifest.string() + " --out " + (dir_ / "a").string()), 0);
  ASSERT_EQ(run("simulate --manifest " + manifest.string() + " --out " + (dir_ / "b").string()), 0);
  EXPECT_EQ(bytes(dir_ / "a" / "data.arr"), bytes(dir_ / "b" / "data.arr"));
  EXPECT_EQ(bytes(dir_ / "a" / "truth.arr"), bytes(dir_ / "b" / "truth.arr"));
  const io::Manifest echo = io::read_manifest(dir_ / "a" / "manifest.txt");
  EXPECT_GT(echo.solver.delta, 0.0);
}

TEST_F(CliTest, SimulateCaseOneShape) {
  const fs::path manifest = fs::path(PAT_SOURCE_DIR) / "manifests" / "case1.txt";
  ASSERT_EQ(run("--threads 4 simulate --manifest " + manifest.string() + " --out " + dir_.string()),
            0);
  const Array2D data = io::read_array2d(dir_ / "data.arr");
  EXPECT_EQ(data.rows(), 128u);
  EXPECT_EQ(data.cols(), 129u);
  const Array2D truth = io::read_array2d(dir_ / "truth.arr");
  EXPECT_EQ(truth.rows(), 129u);
}

TEST_F(CliTest, ReconstructZeroData) {
  const io::Manifest m = small();
  const ScanGeometry g = m.scan_geometry();
  io::write_array(dir_ / "zero.arr", Array2D(g.nphi(), g.time_samples()));
  std::ostringstream log;
  ASSERT_EQ(cmd_reconstruct(m, dir_ / "zero.arr", dir_ / "out", true, log), kExitOk);
  for (double v : io::read_array2d(dir_ / "out" / "recon.arr").flat()) EXPECT_EQ(v, 0.0);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "trace.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "recon.pgm"));
}

TEST_F(CliTest, ReconstructEndToEnd) {
  const fs::path manifest = write_manifest("m.txt", small(64));
  ASSERT_EQ(run("simulate --manifest " + manifest.string() + " --out " + dir_.string()), 0);
  ASSERT_EQ(run("reconstruct --manifest " + (dir_ / "manifest.txt").string() + " --data " +
                (dir_ / "data.arr").string() + " --out " + dir_.string() + " --image"),
            0);
  const Array2D recon = io::read_array2d(dir_ / "recon.arr");
  const Array2D truth = io::read_array2d(dir_ / "truth.arr");
  const double err = testing::relative_error(SourceImage(recon), SourceImage(truth));
  EXPECT_LT(err, 0.5);
}

TEST_F(CliTest, ChecksPass) {
  io::Manifest zero = small(16);
  zero.law.type = io::LawType::Zero;
  const fs::path z = write_manifest("zero.txt", zero);
  const fs::path nsw = write_manifest("nsw.txt", small(16));
  for (const char* which : {"adjoint", "kk", "kernel", "norm"}) {
    EXPECT_EQ(run(std::string("check ") + which + " --manifest " + z.string()), 0) << which;
    EXPECT_EQ(run(std::string("check ") + which + " --manifest " + nsw.string()), 0) << which;
  }
  std::ostringstream log;
  EXPECT_EQ(cmd_check(zero, "kk", log), kExitOk);
  EXPECT_EQ(cmd_check(zero, "bogus", log), kExitUsage);
}

TEST_F(CliTest, KernelDump) {
  io::Manifest zero = small(16);
  zero.law.type = io::LawType::Zero;
  std::ostringstream log;
  ASSERT_EQ(cmd_kernel_dump(zero, dir_ / "z", true, log), kExitOk);
  const Array2D k = io::read_array2d(dir_ / "z" / "kernel.arr");
  const double dt = zero.scan_geometry().dt();
  for (std::size_t l = 0; l < k.rows(); ++l)
    for (std::size_t lp = 0; lp < k.cols(); ++lp)
      EXPECT_NEAR(k(l, lp) * dt, l == lp ? 1.0 : 0.0, 1e-10);
  EXPECT_TRUE(fs::exists(dir_ / "z" / "kernel.pgm"));
  io::write_array(dir_ / "copy.arr", k);
  EXPECT_EQ(bytes(dir_ / "copy.arr"), bytes(dir_ / "z" / "kernel.arr"));

  io::Manifest strong = small(128), weak = small(128);
  weak.law.tau1 = 1e-9;
  ASSERT_EQ(cmd_kernel_dump(strong, dir_ / "s", false, log), kExitOk);
  ASSERT_EQ(cmd_kernel_dump(weak, dir_ / "w", false, log), kExitOk);
  const Array2D ks = io::read_array2d(dir_ / "s" / "kernel.arr");
  const Array2D kw = io::read_array2d(dir_ / "w" / "kernel.arr");
  KernelMatrix a{TemporalGrid(128, 1.0), ks, "s", true}, b{TemporalGrid(128, 1.0), kw, "w", true};
  EXPECT_GT(support_width(kernel_column(a, 80)), support_width(kernel_column(b, 80)));
}

TEST_F(CliTest, ExitCodes) {
  const fs::path good = write_manifest("m.txt", small(16));
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("check bogus --manifest " + good.string()), 2);
  EXPECT_EQ(run("check adjoint --manifest " + (dir_ / "missing.txt").string()), 2);
  const fs::path unknown = write_text("bad.txt", "geometry.R = 0.05\ngeometry.colour = red\n");
  EXPECT_EQ(run("simulate --manifest " + unknown.string() + " --out " + dir_.string()), 2);

  io::write_array(dir_ / "wrong.arr", Array2D(3, 3));
  EXPECT_EQ(run("reconstruct --manifest " + good.string() + " --data " +
                (dir_ / "wrong.arr").string() + " --out " + dir_.string()),
            2);

  io::Manifest diverge = small(16);
  diverge.solver.lambda = 1e12;
  diverge.solver.n_max = 500;
  diverge.solver.project = false;
  const fs::path dm = write_manifest("diverge.txt", diverge);
  ASSERT_EQ(run("simulate --manifest " + dm.string() + " --out " + (dir_ / "d").string()), 0);
  EXPECT_EQ(run("reconstruct --manifest " + dm.string() + " --data " +
                (dir_ / "d" / "data.arr").string() + " --out " + (dir_ / "d").string()),
            3);
}

}  // namespace
}  // namespace pat::cli
