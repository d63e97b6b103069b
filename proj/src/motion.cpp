#include "dynact/motion.hpp"

#include <cmath>
#include <utility>

#include "dynact/errors.hpp"

namespace dynact {

double scale_factor(const BreathingParams& p, double t) {
  return p.amplitude * std::cos(p.frequency * t) + p.offset;
}

AffineMotion AffineMotion::breathing(const BreathingParams& p) {
  AffineMotion m;
  m.model_ = p;
  return m;
}

AffineMotion AffineMotion::custom(Generator gen) {
  AffineMotion m;
  m.model_ = std::move(gen);
  return m;
}

Affine2 AffineMotion::at(double t) const {
  if (const auto* p = std::get_if<BreathingParams>(&model_)) {
    const double s = scale_factor(*p, t);
    const Mat2 A = Mat2::diag(1.0 / s, s);
    // A (x - c) with c = (drift (s - 1), 0)
    return {A, {-(p->drift_coeff * (s - 1.0)) / s, 0.0}};
  }
  if (const auto* g = std::get_if<Generator>(&model_)) return (*g)(t);
  return {};
}

Vec2 phi(const AffineMotion& motion, double t, const Vec2& x) {
  if (const auto* p = motion.breathing_params()) {
    const double s = scale_factor(*p, t);
    return {(x.x - p->drift_coeff * (s - 1.0)) / s, s * x.y};
  }
  return motion.at(t)(x);
}

Affine2 inverse(const Affine2& map) {
  const double det = map.A.det();
  const double scale = std::abs(map.A.a11) + std::abs(map.A.a12) + std::abs(map.A.a21) +
                       std::abs(map.A.a22);
  if (!std::isfinite(det) || std::abs(det) <= 1e-14 * scale * scale) {
    throw GeometryError("affine motion is singular (det A = " + std::to_string(det) +
                        "); Phi_t is not a diffeomorphism");
  }
  const Mat2 inv{map.A.a22 / det, -map.A.a12 / det, -map.A.a21 / det, map.A.a11 / det};
  return {inv, -1.0 * (inv * map.b)};
}

Vec2 phi_inverse(const AffineMotion& motion, double t, const Vec2& x) {
  if (const auto* p = motion.breathing_params()) {
    const double s = scale_factor(*p, t);
    if (!(std::abs(s) > 0.0) || !std::isfinite(s)) {
      throw GeometryError("breathing scale s(t) vanished; Phi_t is not a diffeomorphism");
    }
    return {s * x.x + p->drift_coeff * (s - 1.0), x.y / s};
  }
  return inverse(motion.at(t))(x);
}

}  // namespace dynact
