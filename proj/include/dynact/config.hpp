#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dynact/boundary.hpp"
#include "dynact/image.hpp"
#include "dynact/motion.hpp"
#include "dynact/phantom.hpp"
#include "dynact/projection.hpp"
#include "dynact/reconstruction.hpp"

namespace dynact {

struct MotionConfig {
  std::string model = "breathing";  // "breathing" or "identity"
  BreathingParams breathing;

  AffineMotion build() const;
  friend bool operator==(const MotionConfig&, const MotionConfig&) = default;
};

struct SolverConfig {
  double lambda = 3.46e3;
  double mu = 1.48e3;
  std::size_t grid_size = 257;  // nodes per axis on [-1, 1]
  double cfl_safety = 0.9;
  double length_scale = 1.0;
  std::size_t snapshot_stride = 10;  // scan times between stored snapshots
  std::string domain_label = "body";
  double min_arm_fraction = 0.25;

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

struct PriorConfig {
  double soft_tissue = 1.05e3;
  double spine = 1.85e3;
  std::string spine_label = "spine";

  friend bool operator==(const PriorConfig&, const PriorConfig&) = default;
};

struct EvaluationConfig {
  int supersample = 4;
  double interior_fraction = 0.9;  // domain scaled by this for the interior region

  friend bool operator==(const EvaluationConfig&, const EvaluationConfig&) = default;
};

struct PipelineConfig {
  int schema_version = 1;
  PhantomSpec phantom;
  MotionConfig motion;
  ScanGeometry scan;
  std::optional<double> periods_covered;  // when set, scan.time_step is derived from it
  SolverConfig solver;
  PriorConfig prior;
  std::vector<BoundarySpec> boundary;
  FilterSpec filter;
  ImageSpec image;
  EvaluationConfig evaluation;
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  /// Throws ConfigError listing every problem found.
  void validate() const;
  /// Recomputes derived fields (time step, per-scenario seeds) after edits.
  void resolve();

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Built-in thorax configuration (same content as configs/default.json).
PipelineConfig default_config();

PipelineConfig parse_config(const std::string& json_text);
PipelineConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const PipelineConfig& config);

/// Seed of boundary scenario `index` derived from the run seed.
std::uint64_t scenario_seed(std::uint64_t seed, std::size_t index);

}  // namespace dynact
