#include "dynact/projection.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dynact/errors.hpp"
#include "dynact/parallel.hpp"

namespace dynact {

double ScanGeometry::angle_step() const {
  return (angle_end - angle_start) / static_cast<double>(num_angles);
}

double ScanGeometry::angle(std::size_t n) const {
  return angle_start + static_cast<double>(n) * angle_step();
}

double ScanGeometry::detector_spacing() const {
  return (detector_max - detector_min) / static_cast<double>(num_detectors - 1);
}

double ScanGeometry::detector(std::size_t m) const {
  return detector_min + static_cast<double>(m) * detector_spacing();
}

std::vector<double> ScanGeometry::times() const {
  std::vector<double> t(num_angles);
  for (std::size_t n = 0; n < num_angles; ++n) t[n] = time(n);
  return t;
}

void ScanGeometry::validate() const {
  std::ostringstream err;
  if (num_angles < 1) err << " num_angles must be >= 1;";
  if (num_detectors < 2) err << " num_detectors must be >= 2;";
  if (!(detector_min < detector_max)) err << " detector_min must be < detector_max;";
  if (!(angle_end > angle_start)) err << " angles must be strictly increasing (angle_end > angle_start);";
  if (!std::isfinite(time_start) || !std::isfinite(time_step)) err << " time map must be finite;";
  if (const auto msg = err.str(); !msg.empty()) throw ConfigError("invalid scan geometry:" + msg);
}

double period_covering_time_step(std::size_t num_angles, double frequency, double periods) {
  return periods * (2.0 * std::numbers::pi / frequency) / static_cast<double>(num_angles);
}

double radon_ellipse(const Ellipse& e, const Vec2& omega, double s) {
  // Angle between omega and the ellipse's first axis.
  const double c = std::cos(e.rotation);
  const double sn = std::sin(e.rotation);
  const double cos_rel = omega.x * c + omega.y * sn;
  const double sin_rel = -omega.x * sn + omega.y * c;
  const double a = e.semi_axes.x;
  const double b = e.semi_axes.y;
  const double r2 = a * a * cos_rel * cos_rel + b * b * sin_rel * sin_rel;
  const double d = s - dot(e.center, omega);
  const double h = r2 - d * d;
  if (h <= 0.0) return 0.0;
  return 2.0 * e.density * a * b * std::sqrt(h) / r2;
}

TransformedLine transform_line(const Mat2& A, const Vec2& b, const Vec2& theta, double y) {
  const double det = A.det();
  if (!std::isfinite(det) || det == 0.0) {
    throw GeometryError("transform_line: singular deformation matrix");
  }
  const Vec2 at = A.transposed() * theta;
  const double len = norm(at);
  const double inv = 1.0 / len;
  return {at * inv, (y - dot(b, theta)) * inv, inv};
}

double radon_phantom(const PhantomSpec& spec, const Vec2& omega, double s) {
  double sum = 0.0;
  for (const auto& e : spec.ellipses) sum += radon_ellipse(e, omega, s);
  return sum;
}

Sinogram simulate_scan(const PhantomSpec& spec, const AffineMotion& motion,
                       const ScanGeometry& geometry) {
  geometry.validate();
  Sinogram sino(geometry);
  const std::size_t M = geometry.num_detectors;
  parallel_for(0, geometry.num_angles, [&](std::size_t n) {
    const Affine2 map = motion.at(geometry.time(n));
    const Vec2 theta = geometry.theta(n);
    for (std::size_t m = 0; m < M; ++m) {
      const auto line = transform_line(map.A, map.b, theta, geometry.detector(m));
      sino.at(n, m) = line.scale * radon_phantom(spec, line.omega, line.s);
    }
  });
  return sino;
}

double radon_numeric_oracle(const std::function<double(const Vec2&)>& f, const Vec2& theta,
                            double s, double step) {
  if (!(step > 0.0)) throw ConfigError("radon_numeric_oracle: step must be positive");
  if (std::abs(s) >= 1.0) return 0.0;
  const double half = std::sqrt(1.0 - s * s);
  const auto cells = static_cast<std::size_t>(std::ceil(2.0 * half / step));
  const double h = 2.0 * half / static_cast<double>(cells);
  const Vec2 base = s * theta;
  const Vec2 along{-theta.y, theta.x};
  double sum = 0.0;
  for (std::size_t k = 0; k < cells; ++k) {
    const double tau = -half + (static_cast<double>(k) + 0.5) * h;
    sum += f(base + tau * along);
  }
  return sum * h;
}

}  // namespace dynact
