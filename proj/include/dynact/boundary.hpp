#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dynact/elastic.hpp"
#include "dynact/grid.hpp"
#include "dynact/motion.hpp"

namespace dynact {

enum class BoundaryMode { Exact, Noisy, Sparse };

struct BoundarySpec {
  std::string name = "exact";
  BoundaryMode mode = BoundaryMode::Exact;
  double noise_std = 0.0;            // domain units
  std::size_t num_nodes = 0;         // sparse mode
  std::uint64_t rng_seed = 0;
  bool noise_time_constant = false;  // one draw per node and component for all times

  void validate() const;
  friend bool operator==(const BoundarySpec&, const BoundarySpec&) = default;
};

/// Boundary displacements observed at a list of times. values is
/// times.size() x num_nodes, row-major, nodes ordered as Grid2D::boundary_nodes().
struct BoundaryData {
  std::vector<double> times;
  std::size_t num_nodes = 0;
  std::vector<Vec2> values;

  Vec2& at(std::size_t ti, std::size_t q) { return values[ti * num_nodes + q]; }
  const Vec2& at(std::size_t ti, std::size_t q) const { return values[ti * num_nodes + q]; }
  std::span<const Vec2> row(std::size_t ti) const {
    return {values.data() + ti * num_nodes, num_nodes};
  }

  friend bool operator==(const BoundaryData&, const BoundaryData&) = default;
};

/// Standard normal draws from std::mt19937_64 through the Box-Muller transform.
/// The generator and transform are fixed so that a seed reproduces the same
/// sequence on every platform.
class NormalRng {
 public:
  explicit NormalRng(std::uint64_t seed);
  double next();

 private:
  double uniform();  // in (0, 1]

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// psi(t, x) = phi(t, x) - x at every boundary node's stored position.
BoundaryData sample_boundary(const AffineMotion& motion, const Grid2D& grid,
                             std::span<const double> times);

/// Adds i.i.d. N(0, noise_std^2) to every component of every entry.
BoundaryData perturb(const BoundaryData& bd, const BoundarySpec& spec);

/// Keeps spec.num_nodes nodes equally spaced in arc length and replaces the
/// others by periodic linear interpolation in arc length.
BoundaryData sparsify(const BoundaryData& bd, const BoundarySpec& spec, const Grid2D& grid);

/// Indices (into boundary_nodes()) of the nodes sparsify keeps, ascending in arc length.
std::vector<std::size_t> sparse_node_selection(const Grid2D& grid, std::size_t num_nodes);

/// Applies the spec's mode to exact data.
BoundaryData apply_boundary_spec(const BoundaryData& exact, const BoundarySpec& spec,
                                 const Grid2D& grid);

/// Linear interpolation in time between observation times, clamped at the ends.
BoundarySource interpolating_source(const BoundaryData& bd);

}  // namespace dynact
