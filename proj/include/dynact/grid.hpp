#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "dynact/domain.hpp"
#include "dynact/geometry.hpp"

namespace dynact {

enum class NodeClass : std::uint8_t { Exterior = 0, Interior = 1, Boundary = 2, Ghost = 3 };

/// Ghost value = w0 h(node0) + w1 h(node1) + w2 h(node2). node0 is interior and
/// diagonally adjacent to the ghost; node1 shares node0's column and node2
/// shares node0's row, both on the boundary.
struct GhostStencil {
  std::size_t ghost = 0;
  std::size_t node0 = 0;
  std::size_t node1 = 0;
  std::size_t node2 = 0;
  std::array<double, 3> weights{};
};

/// Distances from an interior node to the nodes its stencil reads along the
/// coordinate axes. Shorter than the grid spacing where a neighbour was
/// snapped onto the boundary.
struct StencilArms {
  double x_minus = 0.0, x_plus = 0.0;
  double y_minus = 0.0, y_plus = 0.0;
};

struct ClassifyOptions {
  /// Interior nodes closer than this fraction of the local spacing to the
  /// boundary along an axis are moved onto the boundary.
  double min_arm_fraction = 0.25;
};

/// Tensor-product grid with node classification for a curved domain.
class Grid2D {
 public:
  std::size_t nx() const { return x_.size(); }
  std::size_t ny() const { return y_.size(); }
  std::size_t size() const { return x_.size() * y_.size(); }
  std::size_t index(std::size_t i, std::size_t j) const { return j * x_.size() + i; }
  std::size_t col(std::size_t k) const { return k % x_.size(); }
  std::size_t row(std::size_t k) const { return k / x_.size(); }

  const std::vector<double>& x_coords() const { return x_; }
  const std::vector<double>& y_coords() const { return y_; }
  NodeClass classification(std::size_t k) const { return class_[k]; }
  const std::vector<NodeClass>& classifications() const { return class_; }
  /// Grid coordinate of a node.
  Vec2 grid_position(std::size_t k) const { return {x_[col(k)], y_[row(k)]}; }
  /// Stored coordinate: the snapped point for boundary nodes, else the grid point.
  const Vec2& position(std::size_t k) const { return position_[k]; }

  const std::vector<std::size_t>& interior_nodes() const { return interior_; }
  const std::vector<StencilArms>& interior_arms() const { return arms_; }
  /// Boundary nodes in ascending index order.
  const std::vector<std::size_t>& boundary_nodes() const { return boundary_; }
  /// Arc-length coordinate of each boundary node (parallel to boundary_nodes()).
  const std::vector<double>& boundary_arc() const { return boundary_arc_; }
  const std::vector<GhostStencil>& ghosts() const { return ghosts_; }
  const Domain& domain() const { return *domain_; }
  std::shared_ptr<const Domain> domain_ptr() const { return domain_; }

  double min_dx() const;
  double min_dy() const;

  friend Grid2D classify_nodes(std::vector<double>, std::vector<double>,
                               std::shared_ptr<const Domain>, const ClassifyOptions&);

 private:
  std::vector<double> x_, y_;
  std::vector<NodeClass> class_;
  std::vector<Vec2> position_;
  std::vector<std::size_t> interior_;
  std::vector<StencilArms> arms_;
  std::vector<std::size_t> boundary_;
  std::vector<double> boundary_arc_;
  std::vector<GhostStencil> ghosts_;
  std::shared_ptr<const Domain> domain_;
};

/// n equally spaced coordinates covering [lo, hi].
std::vector<double> uniform_coords(std::size_t n, double lo, double hi);

/// Classifies every node of the tensor grid against the domain.
///  - inside nodes become INTERIOR unless an axial arm to the boundary is too
///    short, in which case they are snapped onto the boundary (BOUNDARY);
///  - outside nodes read axially by an interior stencil are snapped onto the
///    boundary along that axis (BOUNDARY);
///  - remaining nodes read diagonally by an interior stencil are BOUNDARY if
///    they lie on the boundary, else GHOST with an extrapolation triple;
///  - everything else is EXTERIOR.
/// Throws GeometryError when the domain touches the grid edge or a ghost has
/// no valid extrapolation triple.
Grid2D classify_nodes(std::vector<double> x_coords, std::vector<double> y_coords,
                      std::shared_ptr<const Domain> domain, const ClassifyOptions& options = {});

}  // namespace dynact
