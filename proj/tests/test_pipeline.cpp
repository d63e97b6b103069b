#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "dynact/config.hpp"
#include "dynact/errors.hpp"
#include "dynact/io.hpp"
#include "dynact/parallel.hpp"
#include "dynact/pipeline.hpp"

using namespace dynact;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("dynact_pipe_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

PipelineConfig small_config() {
  PipelineConfig c = default_config();
  c.scan.num_angles = 60;
  c.scan.num_detectors = 65;
  c.solver.grid_size = 65;
  c.solver.snapshot_stride = 5;
  c.image.nx = c.image.ny = 65;
  c.filter.dft_size = 256;
  c.boundary.resize(3);
  c.boundary[2].name = "sparse_8";
  c.boundary[2].mode = BoundaryMode::Sparse;
  c.boundary[2].num_nodes = 8;
  c.boundary[2].noise_std = 0.0;
  c.resolve();
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Image filled(double v, std::size_t n = 8) {
  ImageSpec s;
  s.nx = s.ny = n;
  Image img(s);
  std::fill(img.values.begin(), img.values.end(), v);
  return img;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DYNACT_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("stage names") {
  CHECK(parse_stage("simulate") == Stage::Simulate);
  CHECK(parse_stage("solve-motion") == Stage::SolveMotion);
  CHECK(parse_stage("all") == Stage::All);
  CHECK_THROWS_AS(parse_stage("bake"), ConfigError);
}

TEST_CASE("two-value density prior") {
  const PipelineConfig c = default_config();
  const auto grid = build_grid(c);
  const auto rho = build_density_prior(c, *grid);
  double lo = 1e300;
  for (std::size_t k : grid->interior_nodes()) lo = std::min(lo, rho[k]);
  CHECK(lo == 1050.0);
  auto value_at = [&](Vec2 p) {
    const std::size_t i = static_cast<std::size_t>(std::lround((p.x + 1.0) * 128.0));
    const std::size_t j = static_cast<std::size_t>(std::lround((p.y + 1.0) * 128.0));
    return rho[grid->index(i, j)];
  };
  CHECK(value_at({0.0, -0.375}) == 1850.0);  // spine centre
  CHECK(value_at({-0.375, 0.0625}) == 1050.0);  // lung
  CHECK(value_at({0.0, 0.0}) == 1050.0);
  for (std::size_t k : grid->boundary_nodes()) CHECK(rho[k] == 1050.0);

  PipelineConfig off = c;
  off.phantom.ellipses[3].center = {0.0, -0.58};
  CHECK_THROWS_AS(build_density_prior(off, *grid), ConfigError);
}

TEST_CASE("metric examples") {
  const MetricsReport same = evaluate(filled(0.3), filled(0.3));
  CHECK(same.rmse == 0.0);
  CHECK(std::isinf(same.psnr));

  const MetricsReport c = evaluate(filled(-0.7), filled(0.0));
  CHECK(c.rmse == doctest::Approx(0.7).epsilon(1e-15));

  Image checker = filled(0.0);
  for (std::size_t j = 0; j < 8; ++j)
    for (std::size_t i = 0; i < 8; ++i) checker.at(i, j) = (i + j) % 2 ? 1.0 : -1.0;
  CHECK(evaluate(checker, filled(0.0)).rmse == 1.0);

  Image ref = filled(1.0);
  ref.at(0, 0) = 3.0;
  const MetricsReport r = evaluate(filled(1.0), ref);
  CHECK(r.rmse == doctest::Approx(2.0 / 8.0));
  CHECK(r.relative_l2 == doctest::Approx(2.0 / std::sqrt(63.0 + 9.0)));
  CHECK(r.psnr == doctest::Approx(20.0 * std::log10(2.0 / 0.25)));

  CHECK_THROWS_AS(evaluate(filled(0.0, 8), filled(0.0, 9)), MismatchError);
}

TEST_CASE("region masks follow the phantom labels") {
  const PipelineConfig c = default_config();
  const auto masks = region_masks(c, c.image);
  for (const char* name : {"tumour", "lungs", "spine", "interior"}) REQUIRE(masks.count(name) == 1);
  auto count = [](const RegionMask& m) { return std::count(m.begin(), m.end(), 1); };
  const double area = 4.0 / (256.0 * 256.0);
  CHECK(count(masks.at("tumour")) * area == doctest::Approx(std::numbers::pi * 0.05 * 0.05).epsilon(0.05));
  CHECK(count(masks.at("interior")) * area ==
        doctest::Approx(std::numbers::pi * 0.72 * 0.54).epsilon(0.01));
}

TEST_CASE("full pipeline on a small configuration is deterministic") {
  const PipelineConfig c = small_config();
  TempDir a, b;
  std::ostringstream log;
  const std::size_t saved = max_threads();
  set_max_threads(1);
  run_stage(Stage::All, c, a.path, log);
  set_max_threads(3);
  run_stage(Stage::All, c, b.path, log);
  set_max_threads(saved);

  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(a.path)) {
    ++files;
    const fs::path other = b.path / entry.path().filename();
    REQUIRE(fs::exists(other));
    CHECK_MESSAGE(slurp(entry.path()) == slurp(other), entry.path().filename().string());
  }
  for (const char* f : {"sinogram.sino", "ground_truth.img", "recon_static.img", "recon_exact.img",
                        "recon_pde_exact.img", "recon_pde_noisy_010.img", "recon_pde_sparse_8.img",
                        "motion_exact.field", "boundary_sparse_8.field", "metrics.json"}) {
    CHECK_MESSAGE(fs::exists(a.path / f), f);
  }
  CHECK(files > 10);

  const auto metrics = nlohmann::json::parse(slurp(a.path / "metrics.json"));
  CHECK(metrics.contains("kind"));
  CHECK(metrics["images"].contains("recon_static"));
  CHECK(metrics["images"]["recon_static"]["rmse"].get<double>() > 0.0);

  // Stage isolation: reconstruct only reads files.
  fs::remove(a.path / "recon_exact.img");
  run_stage(Stage::Reconstruct, c, a.path, log);
  CHECK(slurp(a.path / "recon_exact.img") == slurp(b.path / "recon_exact.img"));
}

TEST_CASE("partial stages report missing or mismatched inputs") {
  const PipelineConfig c = small_config();
  TempDir dir;
  std::ostringstream log;
  CHECK_THROWS_AS(run_stage(Stage::Reconstruct, c, dir.path, log), IoError);
  run_stage(Stage::Simulate, c, dir.path, log);
  PipelineConfig other = c;
  other.scan.num_angles = 61;
  other.resolve();
  CHECK_THROWS_AS(run_stage(Stage::Reconstruct, other, dir.path, log), MismatchError);
}

TEST_CASE("command line exit codes") {
  TempDir dir;
  const PipelineConfig c = small_config();
  {
    std::ofstream(dir.path / "ok.json") << serialize_config(c);
    std::ofstream(dir.path / "bad.json") << "{\"schema_version\": 1, \"oops\": true}";
  }
  const std::string out = " --out " + (dir.path / "run").string();
  CHECK(run_cli("simulate --config " + (dir.path / "ok.json").string() + out) == 0);
  CHECK(fs::exists(dir.path / "run" / "sinogram.sino"));
  CHECK(run_cli("evaluate --config " + (dir.path / "ok.json").string() + out) == 3);
  CHECK(run_cli("simulate --config " + (dir.path / "bad.json").string() + out) == 2);
  CHECK(run_cli("simulate --config " + (dir.path / "none.json").string() + out) == 3);
  CHECK(run_cli("bake --config " + (dir.path / "ok.json").string() + out) == 2);
  CHECK(run_cli("simulate") == 2);

  PipelineConfig wide = c;
  wide.scan.num_detectors = 67;
  wide.resolve();
  std::ofstream(dir.path / "wide.json") << serialize_config(wide);
  CHECK(run_cli("reconstruct --config " + (dir.path / "wide.json").string() + out) == 5);
}

TEST_CASE("error classes carry their exit codes") {
  CHECK(Error("x").exit_code() == 1);
  CHECK(ConfigError("x").exit_code() == 2);
  CHECK(GeometryError("x").exit_code() == 2);
  CHECK(IoError("x").exit_code() == 3);
  CHECK(InstabilityError("x", 0, 0).exit_code() == 4);
  CHECK(MismatchError("x").exit_code() == 5);
}
