#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "dynact/geometry.hpp"
#include "dynact/phantom.hpp"

namespace dynact {

/// Closed planar region with a smooth or piecewise smooth outline.
class Domain {
 public:
  virtual ~Domain() = default;

  /// Negative inside, zero on the boundary, positive outside.
  virtual double level(const Vec2& p) const = 0;
  bool inside(const Vec2& p) const { return level(p) < 0.0; }
  /// |level| below this counts as lying on the boundary.
  virtual double boundary_tolerance() const { return 1e-12; }
  bool on_boundary(const Vec2& p) const { return std::abs(level(p)) <= boundary_tolerance(); }

  /// Boundary point on the segment [from, to]; `from` inside, `to` not inside.
  virtual Vec2 crossing(const Vec2& from, const Vec2& to) const;
  virtual Vec2 closest_boundary_point(const Vec2& p) const = 0;
  /// Arc-length coordinate in [0, perimeter) of a point on the boundary.
  virtual double arc_position(const Vec2& on_boundary) const = 0;
  virtual double perimeter() const = 0;
};

class EllipseDomain final : public Domain {
 public:
  explicit EllipseDomain(const Ellipse& e);

  double level(const Vec2& p) const override { return ellipse_.quadratic_form(p) - 1.0; }
  Vec2 closest_boundary_point(const Vec2& p) const override;
  double arc_position(const Vec2& on_boundary) const override;
  double perimeter() const override { return arc_table_.back(); }
  const Ellipse& ellipse() const { return ellipse_; }

 private:
  Vec2 to_local(const Vec2& p) const;
  double arc_from_parameter(double tau) const;

  Ellipse ellipse_;
  std::vector<double> arc_table_;  // arc length at tau_k = 2 pi k / K
};

/// Axis-aligned rectangle [xmin, xmax] x [ymin, ymax].
class RectangleDomain final : public Domain {
 public:
  RectangleDomain(double xmin, double xmax, double ymin, double ymax);

  double level(const Vec2& p) const override;
  Vec2 closest_boundary_point(const Vec2& p) const override;
  double arc_position(const Vec2& on_boundary) const override;
  double perimeter() const override { return 2.0 * ((xmax_ - xmin_) + (ymax_ - ymin_)); }

 private:
  double xmin_, xmax_, ymin_, ymax_;
};

/// Half-plane {p : dot(p - origin, normal) < 0} clipped to a rectangle; used
/// for small hand-built stencil patches.
class ClippedHalfPlaneDomain final : public Domain {
 public:
  ClippedHalfPlaneDomain(Vec2 origin, Vec2 normal, double xmin, double xmax, double ymin,
                         double ymax);

  double level(const Vec2& p) const override;
  Vec2 closest_boundary_point(const Vec2& p) const override;
  double arc_position(const Vec2& on_boundary) const override;
  double perimeter() const override { return box_.perimeter(); }

 private:
  Vec2 origin_, normal_;
  RectangleDomain box_;
};

}  // namespace dynact
