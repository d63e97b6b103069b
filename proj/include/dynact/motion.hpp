#pragma once

#include <functional>
#include <variant>

#include "dynact/geometry.hpp"

namespace dynact {

/// Parameters of the breathing model
///   s(t)    = amplitude * cos(frequency * t) + offset
///   Phi(t,x) = diag(1/s, s) (x - (drift_coeff * (s - 1), 0))
struct BreathingParams {
  double amplitude = 0.05;
  double frequency = 0.04;
  double offset = 0.95;
  double drift_coeff = 0.44;

  friend bool operator==(const BreathingParams&, const BreathingParams&) = default;
};

double scale_factor(const BreathingParams& p, double t);

/// Time-dependent affine deformation Phi(t, x) = A(t) x + b(t).
class AffineMotion {
 public:
  using Generator = std::function<Affine2(double)>;

  AffineMotion() = default;  // identity
  static AffineMotion identity() { return {}; }
  static AffineMotion breathing(const BreathingParams& p = {});
  /// Arbitrary time-indexed affine map, mainly for tests.
  static AffineMotion custom(Generator gen);

  Affine2 at(double t) const;
  bool is_identity() const { return std::holds_alternative<std::monostate>(model_); }
  const BreathingParams* breathing_params() const { return std::get_if<BreathingParams>(&model_); }

 private:
  std::variant<std::monostate, BreathingParams, Generator> model_;
};

Vec2 phi(const AffineMotion& motion, double t, const Vec2& x);

/// Throws GeometryError when A(t) is singular.
Vec2 phi_inverse(const AffineMotion& motion, double t, const Vec2& x);

/// Inverse of an affine map; throws GeometryError when singular.
Affine2 inverse(const Affine2& map);

}  // namespace dynact
