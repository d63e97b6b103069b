#include "dynact/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "dynact/domain.hpp"
#include "dynact/errors.hpp"
#include "dynact/io.hpp"
#include "dynact/provider.hpp"
#include "dynact/reconstruction.hpp"

namespace dynact {

Stage parse_stage(const std::string& name) {
  if (name == "simulate") return Stage::Simulate;
  if (name == "solve-motion") return Stage::SolveMotion;
  if (name == "reconstruct") return Stage::Reconstruct;
  if (name == "evaluate") return Stage::Evaluate;
  if (name == "all") return Stage::All;
  throw ConfigError("unknown stage '" + name +
                    "' (expected simulate, solve-motion, reconstruct, evaluate or all)");
}

std::shared_ptr<const Grid2D> build_grid(const PipelineConfig& config) {
  const Ellipse* body = config.phantom.find(config.solver.domain_label);
  if (!body) throw ConfigError("no ellipse labelled '" + config.solver.domain_label + "'");
  const auto coords = uniform_coords(config.solver.grid_size, -1.0, 1.0);
  ClassifyOptions opt;
  opt.min_arm_fraction = config.solver.min_arm_fraction;
  return std::make_shared<const Grid2D>(
      classify_nodes(coords, coords, std::make_shared<EllipseDomain>(*body), opt));
}

std::vector<double> build_density_prior(const PipelineConfig& config, const Grid2D& grid) {
  const auto spines = config.phantom.find_all(config.prior.spine_label);
  if (spines.empty()) throw ConfigError("no ellipse labelled '" + config.prior.spine_label + "'");
  for (const Ellipse* e : spines) {
    for (int q = 0; q < 64; ++q) {
      const Vec2 p = e->outline_point(2.0 * 3.141592653589793 * q / 64.0);
      if (!grid.domain().inside(p)) throw ConfigError("spine region extends outside the solver domain");
    }
  }
  std::vector<double> rho(grid.size(), config.prior.soft_tissue);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vec2 p = grid.position(k);
    for (const Ellipse* e : spines) {
      if (e->contains(p)) rho[k] = config.prior.spine;
    }
  }
  return rho;
}

Sinogram simulate_sinogram(const PipelineConfig& config) {
  return simulate_scan(config.phantom, config.motion.build(), config.scan);
}

Image ground_truth(const PipelineConfig& config) {
  return rasterize(config.phantom, config.image, config.evaluation.supersample);
}

std::vector<double> snapshot_times(const PipelineConfig& config) {
  std::vector<double> t;
  const std::size_t n = config.scan.num_angles;
  for (std::size_t i = 0; i < n; i += config.solver.snapshot_stride) t.push_back(config.scan.time(i));
  if ((n - 1) % config.solver.snapshot_stride != 0) t.push_back(config.scan.time(n - 1));
  return t;
}

BoundaryData exact_boundary_data(const PipelineConfig& config, const Grid2D& grid) {
  const auto times = config.scan.times();
  return sample_boundary(config.motion.build(), grid, times);
}

DisplacementHistory solve_motion(const PipelineConfig& config, const Grid2D& grid,
                                 const BoundaryData& observed) {
  MaterialParams params;
  params.lambda = config.solver.lambda;
  params.mu = config.solver.mu;
  params.length_scale = config.solver.length_scale;
  params.rho0 = build_density_prior(config, grid);

  SolveOptions opt;
  const auto times = snapshot_times(config);
  opt.t_end = times.back();
  opt.cfl_safety = config.solver.cfl_safety;
  if (opt.t_end <= 0.0) {
    // Degenerate single-time scan: nothing moves.
    DisplacementHistory h;
    h.snapshots.push_back({0.0, FieldLevel(grid.size())});
    return h;
  }
  opt.output_times = times;
  return solve(grid, params, InitialData{}, interpolating_source(observed), opt);
}

std::map<std::string, RegionMask> region_masks(const PipelineConfig& config, const ImageSpec& spec) {
  std::map<std::string, RegionMask> masks;
  auto mask_of = [&](const std::vector<const Ellipse*>& ellipses) {
    RegionMask m(spec.size(), 0);
    for (std::size_t j = 0; j < spec.ny; ++j) {
      for (std::size_t i = 0; i < spec.nx; ++i) {
        const Vec2 p = spec.pixel_center(i, j);
        for (const Ellipse* e : ellipses) {
          if (e->contains(p)) m[j * spec.nx + i] = 1;
        }
      }
    }
    return m;
  };
  const std::pair<const char*, const char*> named[] = {
      {"tumour", "tumour"}, {"lungs", "lung"}, {"spine", config.prior.spine_label.c_str()}};
  for (const auto& [region, label] : named) {
    const auto found = config.phantom.find_all(label);
    if (!found.empty()) masks[region] = mask_of(found);
  }
  if (const Ellipse* body = config.phantom.find(config.solver.domain_label)) {
    const Ellipse inner = body->scaled(config.evaluation.interior_fraction);
    masks["interior"] = mask_of({&inner});
  }
  return masks;
}

MetricsReport evaluate(const Image& a, const Image& b, const std::map<std::string, RegionMask>& regions) {
  if (!(a.spec == b.spec) || a.values.size() != b.values.size()) {
    throw MismatchError("evaluate: images differ in size or extent");
  }
  MetricsReport r;
  const std::size_t n = a.values.size();
  double se = 0.0, ref2 = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = a.values[k] - b.values[k];
    se += d * d;
    ref2 += b.values[k] * b.values[k];
    lo = std::min(lo, b.values[k]);
    hi = std::max(hi, b.values[k]);
  }
  r.rmse = std::sqrt(se / static_cast<double>(n));
  r.relative_l2 = ref2 > 0.0 ? std::sqrt(se / ref2) : (se > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  const double peak = hi > lo ? hi - lo : 1.0;
  r.psnr = r.rmse > 0.0 ? 20.0 * std::log10(peak / r.rmse) : std::numeric_limits<double>::infinity();
  for (const auto& [name, mask] : regions) {
    if (mask.size() != n) throw MismatchError("evaluate: region mask size mismatch");
    RegionStats s;
    double rse = 0.0, sa = 0.0, sb = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (!mask[k]) continue;
      const double d = a.values[k] - b.values[k];
      rse += d * d;
      sa += a.values[k];
      sb += b.values[k];
      ++s.pixels;
    }
    if (s.pixels > 0) {
      const auto m = static_cast<double>(s.pixels);
      s.rmse = std::sqrt(rse / m);
      s.mean = sa / m;
      s.reference_mean = sb / m;
    }
    r.regions[name] = s;
  }
  return r;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void write_image_pair(const std::filesystem::path& dir, const std::string& stem, const Image& img) {
  write_image(dir / (stem + ".img"), img);
  write_pgm(dir / (stem + ".pgm"), img);
}

std::vector<std::string> reconstruction_names(const PipelineConfig& config) {
  std::vector<std::string> names{"recon_static", "recon_exact"};
  for (const auto& b : config.boundary) names.push_back("recon_pde_" + b.name);
  return names;
}

void stage_simulate(const PipelineConfig& config, const std::filesystem::path& dir, std::ostream& log) {
  const auto t0 = Clock::now();
  write_sinogram(dir / "sinogram.sino", simulate_sinogram(config));
  write_image_pair(dir, "ground_truth", ground_truth(config));
  log << "simulate: sinogram " << config.scan.num_angles << "x" << config.scan.num_detectors
      << ", ground truth " << config.image.nx << "x" << config.image.ny << " ("
      << seconds_since(t0) << " s)\n";
}

void stage_solve(const PipelineConfig& config, const std::filesystem::path& dir, std::ostream& log) {
  const auto grid = build_grid(config);
  const BoundaryData exact = exact_boundary_data(config, *grid);
  log << "solve-motion: " << grid->interior_nodes().size() << " interior, "
      << grid->boundary_nodes().size() << " boundary, " << grid->ghosts().size()
      << " ghost nodes\n";
  for (const auto& spec : config.boundary) {
    const auto t0 = Clock::now();
    const BoundaryData observed = apply_boundary_spec(exact, spec, *grid);
    write_boundary_field(dir / ("boundary_" + spec.name + ".field"), *grid, observed);
    const DisplacementHistory h = solve_motion(config, *grid, observed);
    write_field(dir / ("motion_" + spec.name + ".field"), *grid, h);
    log << "solve-motion: " << spec.name << " done, " << h.snapshots.size() << " snapshots ("
        << seconds_since(t0) << " s)\n";
  }
}

void check_sinogram(const Sinogram& s, const ScanGeometry& g) {
  const ScanGeometry& f = s.geometry;
  if (f.num_angles != g.num_angles || f.num_detectors != g.num_detectors ||
      f.angle_start != g.angle_start || f.angle_end != g.angle_end ||
      f.detector_min != g.detector_min || f.detector_max != g.detector_max) {
    throw MismatchError("sinogram geometry does not match the configured scan");
  }
}

void stage_reconstruct(const PipelineConfig& config, const std::filesystem::path& dir,
                       std::ostream& log) {
  const auto t0 = Clock::now();
  Sinogram sino = read_sinogram(dir / "sinogram.sino");
  check_sinogram(sino, config.scan);
  sino.geometry = config.scan;
  const Sinogram filtered = filter_sinogram(sino, config.filter);
  write_image_pair(dir, "recon_static", static_backproject(filtered, config.image));
  write_image_pair(dir, "recon_exact",
                   backproject(filtered, DeformationProvider::analytic(config.motion.build()),
                               config.image));
  const auto grid = build_grid(config);
  for (const auto& spec : config.boundary) {
    FieldFile file = read_field(dir / ("motion_" + spec.name + ".field"));
    check_field_matches(file, *grid);
    const auto provider = DeformationProvider::from_field(grid, file.history);
    write_image_pair(dir, "recon_pde_" + spec.name, backproject(filtered, provider, config.image));
  }
  log << "reconstruct: " << reconstruction_names(config).size() << " images ("
      << seconds_since(t0) << " s)\n";
}

nlohmann::json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

void stage_evaluate(const PipelineConfig& config, const std::filesystem::path& dir, std::ostream& log) {
  const Image reference = read_image(dir / "ground_truth.img");
  const auto masks = region_masks(config, reference.spec);
  nlohmann::json images = nlohmann::json::object();
  for (const auto& name : reconstruction_names(config)) {
    const MetricsReport r = evaluate(read_image(dir / (name + ".img")), reference, masks);
    nlohmann::json regions = nlohmann::json::object();
    for (const auto& [region, s] : r.regions) {
      regions[region] = {{"rmse", s.rmse},
                         {"mean", s.mean},
                         {"reference_mean", s.reference_mean},
                         {"pixels", s.pixels}};
    }
    images[name] = {{"rmse", r.rmse},
                    {"relative_l2", number_or_inf(r.relative_l2)},
                    {"psnr", number_or_inf(r.psnr)},
                    {"regions", regions}};
    log << "evaluate: " << name << " rmse " << r.rmse << "\n";
  }
  nlohmann::json report = {
      {"kind", "artifact metrics computed by this toolkit; not values from any publication"},
      {"reference", "ground_truth.img"},
      {"images", images}};
  std::ofstream out(dir / "metrics.json", std::ios::trunc);
  if (!out) throw IoError("cannot write " + (dir / "metrics.json").string());
  out << report.dump(2) << "\n";
  if (!out) throw IoError("write to metrics.json failed");
}

}  // namespace

void run_stage(Stage stage, const PipelineConfig& config, const std::filesystem::path& out_dir,
               std::ostream& log) {
  config.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());
  switch (stage) {
    case Stage::Simulate: stage_simulate(config, out_dir, log); break;
    case Stage::SolveMotion: stage_solve(config, out_dir, log); break;
    case Stage::Reconstruct: stage_reconstruct(config, out_dir, log); break;
    case Stage::Evaluate: stage_evaluate(config, out_dir, log); break;
    case Stage::All:
      stage_simulate(config, out_dir, log);
      stage_solve(config, out_dir, log);
      stage_reconstruct(config, out_dir, log);
      stage_evaluate(config, out_dir, log);
      break;
  }
}

}  // namespace dynact
