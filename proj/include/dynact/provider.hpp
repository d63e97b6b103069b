#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "dynact/elastic.hpp"
#include "dynact/grid.hpp"
#include "dynact/motion.hpp"

namespace dynact {

/// Displacement history prepared for evaluation anywhere in the plane. Nodes
/// that are neither interior nor boundary take the boundary displacement at
/// their closest boundary point, which keeps the bilinear interpolant
/// continuous across the boundary and constant along its normals outside.
class FieldMotion {
 public:
  FieldMotion(std::shared_ptr<const Grid2D> grid, const DisplacementHistory& history);

  const Grid2D& grid() const { return *grid_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<FieldLevel>& fields() const { return fields_; }

  /// Extended field blended linearly between the bracketing snapshots
  /// (clamped outside the recorded time range).
  FieldLevel at_time(double t) const;
  /// Bilinear interpolation of a nodal field; x is clamped to the grid box.
  Vec2 interpolate(const FieldLevel& field, const Vec2& x) const;

 private:
  std::shared_ptr<const Grid2D> grid_;
  std::vector<double> times_;
  std::vector<FieldLevel> fields_;
};

/// Evaluates x -> Phi_t x for the reconstructor, either from the analytic
/// motion or from a solved displacement field.
class DeformationProvider {
 public:
  /// Phi frozen at one time, cheap to evaluate many times.
  class Frame {
   public:
    Vec2 operator()(const Vec2& x) const;

   private:
    friend class DeformationProvider;
    const FieldMotion* field_ = nullptr;
    Affine2 map_;
    FieldLevel u_;
  };

  DeformationProvider() = default;  // identity
  static DeformationProvider identity() { return {}; }
  static DeformationProvider analytic(const AffineMotion& motion);
  static DeformationProvider from_field(std::shared_ptr<const Grid2D> grid,
                                        const DisplacementHistory& history);

  bool is_identity() const;
  Frame frame(double t) const;
  Vec2 eval(double t, const Vec2& x) const { return frame(t)(x); }

 private:
  std::variant<AffineMotion, std::shared_ptr<const FieldMotion>> source_;
};

}  // namespace dynact
