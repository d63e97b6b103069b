#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "dynact/geometry.hpp"
#include "dynact/motion.hpp"
#include "dynact/phantom.hpp"

namespace dynact {

/// Parallel-beam acquisition. Source position n is taken at angle
/// alpha_n = angle_start + n (angle_end - angle_start) / num_angles (end point
/// excluded) and at time t_n = time_start + n * time_step.
struct ScanGeometry {
  std::size_t num_angles = 660;
  double angle_start = 0.0;
  double angle_end = 3.14159265358979323846;
  std::size_t num_detectors = 451;
  double detector_min = -1.0;
  double detector_max = 1.0;
  double time_start = 0.0;
  double time_step = 0.0;

  double angle(std::size_t n) const;
  Vec2 theta(std::size_t n) const { return direction(angle(n)); }
  double angle_step() const;
  double detector(std::size_t m) const;
  double detector_spacing() const;
  double time(std::size_t n) const { return time_start + static_cast<double>(n) * time_step; }
  std::vector<double> times() const;

  /// Throws ConfigError listing every violated invariant.
  void validate() const;

  friend bool operator==(const ScanGeometry&, const ScanGeometry&) = default;
};

/// Time step that spreads the scan over `periods` full periods of the
/// breathing motion.
double period_covering_time_step(std::size_t num_angles, double frequency, double periods = 1.0);

struct Sinogram {
  ScanGeometry geometry;
  std::vector<double> values;  // num_angles x num_detectors, row-major

  Sinogram() = default;
  explicit Sinogram(const ScanGeometry& g)
      : geometry(g), values(g.num_angles * g.num_detectors, 0.0) {}

  double& at(std::size_t n, std::size_t m) { return values[n * geometry.num_detectors + m]; }
  double at(std::size_t n, std::size_t m) const { return values[n * geometry.num_detectors + m]; }
};

/// Line integral of the ellipse along {x : x . omega = s}, omega a unit vector.
double radon_ellipse(const Ellipse& e, const Vec2& omega, double s);
inline double radon_ellipse(const Ellipse& e, double theta, double s) {
  return radon_ellipse(e, direction(theta), s);
}

struct TransformedLine {
  Vec2 omega;    // unit normal of the pulled-back line
  double s;      // its signed offset
  double scale;  // 1 / |A^T theta|
};

/// Pulls the line {z : z . theta = y} back through z = A x + b. Under the
/// mass-preserving model the line integral of f_t equals
/// scale * (R f0)(omega, s). Throws GeometryError for singular A.
TransformedLine transform_line(const Mat2& A, const Vec2& b, const Vec2& theta, double y);

double radon_phantom(const PhantomSpec& spec, const Vec2& omega, double s);

/// Analytic dynamic Radon data of the moving phantom.
Sinogram simulate_scan(const PhantomSpec& spec, const AffineMotion& motion,
                       const ScanGeometry& geometry);

/// Composite midpoint rule for the integral of f along {x : x . theta = s},
/// restricted to the chord of the unit disk. Independent of the analytic path.
double radon_numeric_oracle(const std::function<double(const Vec2&)>& f, const Vec2& theta,
                            double s, double step);

}  // namespace dynact
