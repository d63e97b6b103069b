#include "dynact/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dynact {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kArcSegments = 4096;

double wrap_angle(double tau) {
  tau = std::fmod(tau, kTwoPi);
  return tau < 0.0 ? tau + kTwoPi : tau;
}

}  // namespace

Vec2 Domain::crossing(const Vec2& from, const Vec2& to) const {
  // Bisection on the level set; stops once the bracket can no longer shrink.
  Vec2 lo = from;
  Vec2 hi = to;
  if (on_boundary(hi)) return hi;
  for (int it = 0; it < 200; ++it) {
    const Vec2 mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (inside(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

EllipseDomain::EllipseDomain(const Ellipse& e) : ellipse_(e) {
  const double a = e.semi_axes.x;
  const double b = e.semi_axes.y;
  auto speed = [&](double tau) {
    return std::hypot(a * std::sin(tau), b * std::cos(tau));
  };
  const double d = kTwoPi / kArcSegments;
  arc_table_.resize(kArcSegments + 1, 0.0);
  for (std::size_t k = 0; k < kArcSegments; ++k) {
    const double t0 = d * static_cast<double>(k);
    const double h = d / 4.0;
    double s = speed(t0) + speed(t0 + d);
    for (int q = 1; q < 4; ++q) s += (q % 2 ? 4.0 : 2.0) * speed(t0 + q * h);
    arc_table_[k + 1] = arc_table_[k] + s * h / 3.0;
  }
}

Vec2 EllipseDomain::to_local(const Vec2& p) const {
  const double c = std::cos(ellipse_.rotation);
  const double s = std::sin(ellipse_.rotation);
  const Vec2 d = p - ellipse_.center;
  return {c * d.x + s * d.y, -s * d.x + c * d.y};
}

double EllipseDomain::arc_from_parameter(double tau) const {
  tau = wrap_angle(tau);
  const double d = kTwoPi / kArcSegments;
  auto k = static_cast<std::size_t>(tau / d);
  if (k >= kArcSegments) k = kArcSegments - 1;
  const double t0 = d * static_cast<double>(k);
  const double a = ellipse_.semi_axes.x;
  const double b = ellipse_.semi_axes.y;
  auto speed = [&](double t) { return std::hypot(a * std::sin(t), b * std::cos(t)); };
  const double h = (tau - t0) / 8.0;
  double s = speed(t0) + speed(tau);
  for (int q = 1; q < 8; ++q) s += (q % 2 ? 4.0 : 2.0) * speed(t0 + q * h);
  return arc_table_[k] + s * h / 3.0;
}

Vec2 EllipseDomain::closest_boundary_point(const Vec2& p) const {
  const Vec2 q = to_local(p);
  const double a = ellipse_.semi_axes.x;
  const double b = ellipse_.semi_axes.y;
  auto dist2 = [&](double tau) {
    const double dx = a * std::cos(tau) - q.x;
    const double dy = b * std::sin(tau) - q.y;
    return dx * dx + dy * dy;
  };
  constexpr int kSamples = 128;
  double best = 0.0;
  double best_d = dist2(0.0);
  for (int k = 1; k < kSamples; ++k) {
    const double tau = kTwoPi * k / kSamples;
    if (const double dd = dist2(tau); dd < best_d) {
      best_d = dd;
      best = tau;
    }
  }
  // Golden-section refinement inside the neighbouring sample interval.
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = best - kTwoPi / kSamples;
  double hi = best + kTwoPi / kSamples;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = dist2(x1);
  double f2 = dist2(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = dist2(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = dist2(x2);
    }
  }
  return ellipse_.outline_point(0.5 * (lo + hi));
}

double EllipseDomain::arc_position(const Vec2& on_boundary) const {
  const Vec2 q = to_local(on_boundary);
  const double tau = std::atan2(q.y / ellipse_.semi_axes.y, q.x / ellipse_.semi_axes.x);
  const double s = arc_from_parameter(tau);
  return s >= perimeter() ? s - perimeter() : s;
}

RectangleDomain::RectangleDomain(double xmin, double xmax, double ymin, double ymax)
    : xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax) {}

double RectangleDomain::level(const Vec2& p) const {
  return std::max({xmin_ - p.x, p.x - xmax_, ymin_ - p.y, p.y - ymax_});
}

Vec2 RectangleDomain::closest_boundary_point(const Vec2& p) const {
  if (level(p) >= 0.0) {
    return {std::clamp(p.x, xmin_, xmax_), std::clamp(p.y, ymin_, ymax_)};
  }
  const double d[4] = {p.x - xmin_, xmax_ - p.x, p.y - ymin_, ymax_ - p.y};
  const auto side = std::min_element(d, d + 4) - d;
  switch (side) {
    case 0: return {xmin_, p.y};
    case 1: return {xmax_, p.y};
    case 2: return {p.x, ymin_};
    default: return {p.x, ymax_};
  }
}

double RectangleDomain::arc_position(const Vec2& p) const {
  // Counter-clockwise from (xmin, ymin).
  const double w = xmax_ - xmin_;
  const double h = ymax_ - ymin_;
  const double d[4] = {std::abs(p.y - ymin_), std::abs(p.x - xmax_), std::abs(p.y - ymax_),
                       std::abs(p.x - xmin_)};
  const auto side = std::min_element(d, d + 4) - d;
  double s = 0.0;
  switch (side) {
    case 0: s = p.x - xmin_; break;
    case 1: s = w + (p.y - ymin_); break;
    case 2: s = w + h + (xmax_ - p.x); break;
    default: s = 2.0 * w + h + (ymax_ - p.y); break;
  }
  return s >= perimeter() ? s - perimeter() : s;
}

ClippedHalfPlaneDomain::ClippedHalfPlaneDomain(Vec2 origin, Vec2 normal, double xmin, double xmax,
                                               double ymin, double ymax)
    : origin_(origin), normal_((1.0 / norm(normal)) * normal), box_(xmin, xmax, ymin, ymax) {}

double ClippedHalfPlaneDomain::level(const Vec2& p) const {
  return std::max(dot(p - origin_, normal_), box_.level(p));
}

Vec2 ClippedHalfPlaneDomain::closest_boundary_point(const Vec2& p) const {
  const double plane = dot(p - origin_, normal_);
  if (plane >= box_.level(p)) return p - plane * normal_;
  return box_.closest_boundary_point(p);
}

double ClippedHalfPlaneDomain::arc_position(const Vec2& on_boundary) const {
  return box_.arc_position(on_boundary);
}

}  // namespace dynact
