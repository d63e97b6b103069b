#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "dynact/boundary.hpp"
#include "dynact/config.hpp"
#include "dynact/elastic.hpp"
#include "dynact/grid.hpp"
#include "dynact/image.hpp"
#include "dynact/projection.hpp"

namespace dynact {

enum class Stage { Simulate, SolveMotion, Reconstruct, Evaluate, All };

/// Accepts simulate, solve-motion, reconstruct, evaluate, all.
Stage parse_stage(const std::string& name);

/// Solver grid on [-1, 1]^2 classified against the configured domain ellipse.
std::shared_ptr<const Grid2D> build_grid(const PipelineConfig& config);

/// Two-value density prior: spine inside the spine ellipse, soft tissue
/// everywhere else (which covers every node next to the outer boundary).
std::vector<double> build_density_prior(const PipelineConfig& config, const Grid2D& grid);

Sinogram simulate_sinogram(const PipelineConfig& config);
/// f0 rasterized with the configured supersampling.
Image ground_truth(const PipelineConfig& config);

/// Scan times at which displacement snapshots are kept.
std::vector<double> snapshot_times(const PipelineConfig& config);

/// Exact boundary displacements of the configured motion at every scan time.
BoundaryData exact_boundary_data(const PipelineConfig& config, const Grid2D& grid);

/// Solves for the interior motion driven by the given boundary observations.
DisplacementHistory solve_motion(const PipelineConfig& config, const Grid2D& grid,
                                 const BoundaryData& observed);

struct RegionStats {
  double rmse = 0.0;
  double mean = 0.0;            // of the reconstruction
  double reference_mean = 0.0;  // of the reference
  std::size_t pixels = 0;
};

struct MetricsReport {
  double rmse = 0.0;
  double relative_l2 = 0.0;
  double psnr = 0.0;  // +inf when rmse == 0
  std::map<std::string, RegionStats> regions;
};

using RegionMask = std::vector<char>;

/// tumour, lungs, spine (by phantom label) and interior (domain ellipse
/// scaled by the configured fraction), evaluated at pixel centres.
std::map<std::string, RegionMask> region_masks(const PipelineConfig& config, const ImageSpec& spec);

/// Throws MismatchError when the images differ in size or extent.
MetricsReport evaluate(const Image& reconstruction, const Image& reference,
                       const std::map<std::string, RegionMask>& regions = {});

/// Runs one stage (or all) writing artifacts into out_dir.
void run_stage(Stage stage, const PipelineConfig& config, const std::filesystem::path& out_dir,
               std::ostream& log);

}  // namespace dynact
