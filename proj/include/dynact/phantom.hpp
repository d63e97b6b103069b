#pragma once

#include <span>
#include <string>
#include <vector>

#include "dynact/geometry.hpp"
#include "dynact/image.hpp"
#include "dynact/motion.hpp"

namespace dynact {

struct Ellipse {
  Vec2 center;
  Vec2 semi_axes{1.0, 1.0};
  double rotation = 0.0;  // radians, counter-clockwise
  double density = 1.0;   // additive
  std::string label;      // region tag used for metrics and the density prior

  /// Closed membership test.
  bool contains(const Vec2& x) const;
  /// Quadratic form value; <= 1 inside.
  double quadratic_form(const Vec2& x) const;
  /// Point on the outline at parameter angle tau.
  Vec2 outline_point(double tau) const;
  /// Same ellipse with semi-axes scaled about the centre.
  Ellipse scaled(double factor) const;

  friend bool operator==(const Ellipse&, const Ellipse&) = default;
};

/// Piecewise constant object; densities add where ellipses overlap.
struct PhantomSpec {
  std::vector<Ellipse> ellipses;

  /// First ellipse carrying the given label, or nullptr.
  const Ellipse* find(const std::string& label) const;
  std::vector<const Ellipse*> find_all(const std::string& label) const;

  friend bool operator==(const PhantomSpec&, const PhantomSpec&) = default;
};

double eval_f0(const PhantomSpec& spec, const Vec2& x);

/// Mass-preserving state at time t: f0(Phi_t^{-1} x) |det D Phi_t^{-1}|.
double eval_ft(const PhantomSpec& spec, const AffineMotion& motion, double t, const Vec2& x);

/// Largest distance from the origin reached by any ellipse outline under the
/// motion at the given times (outline sampled at `samples` points).
double max_support_radius(const PhantomSpec& spec, const AffineMotion& motion,
                          std::span<const double> times, int samples = 256);

/// f0 on the image grid, averaged over supersample x supersample points per pixel.
Image rasterize(const PhantomSpec& spec, const ImageSpec& image, int supersample = 4);

}  // namespace dynact
