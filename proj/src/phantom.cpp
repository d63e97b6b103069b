#include "dynact/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dynact/parallel.hpp"

namespace dynact {

double Ellipse::quadratic_form(const Vec2& x) const {
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  const Vec2 d = x - center;
  const double u = (c * d.x + s * d.y) / semi_axes.x;
  const double v = (-s * d.x + c * d.y) / semi_axes.y;
  return u * u + v * v;
}

bool Ellipse::contains(const Vec2& x) const { return quadratic_form(x) <= 1.0; }

Vec2 Ellipse::outline_point(double tau) const {
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  const double u = semi_axes.x * std::cos(tau);
  const double v = semi_axes.y * std::sin(tau);
  return {center.x + c * u - s * v, center.y + s * u + c * v};
}

Ellipse Ellipse::scaled(double factor) const {
  Ellipse e = *this;
  e.semi_axes = factor * semi_axes;
  return e;
}

const Ellipse* PhantomSpec::find(const std::string& label) const {
  for (const auto& e : ellipses) {
    if (e.label == label) return &e;
  }
  return nullptr;
}

std::vector<const Ellipse*> PhantomSpec::find_all(const std::string& label) const {
  std::vector<const Ellipse*> out;
  for (const auto& e : ellipses) {
    if (e.label == label) out.push_back(&e);
  }
  return out;
}

double eval_f0(const PhantomSpec& spec, const Vec2& x) {
  double sum = 0.0;
  for (const auto& e : spec.ellipses) {
    if (e.contains(x)) sum += e.density;
  }
  return sum;
}

double eval_ft(const PhantomSpec& spec, const AffineMotion& motion, double t, const Vec2& x) {
  if (motion.is_identity()) return eval_f0(spec, x);
  const Vec2 x0 = phi_inverse(motion, t, x);
  // det(diag(1/s, s)) = 1 for the breathing model.
  const double jacobian =
      motion.breathing_params() ? 1.0 : 1.0 / std::abs(motion.at(t).A.det());
  return eval_f0(spec, x0) * jacobian;
}

double max_support_radius(const PhantomSpec& spec, const AffineMotion& motion,
                          std::span<const double> times, int samples) {
  double r = 0.0;
  for (double t : times) {
    for (const auto& e : spec.ellipses) {
      for (int k = 0; k < samples; ++k) {
        const double tau = 2.0 * std::numbers::pi * k / samples;
        r = std::max(r, norm(phi(motion, t, e.outline_point(tau))));
      }
    }
  }
  return r;
}

Image rasterize(const PhantomSpec& spec, const ImageSpec& image, int supersample) {
  Image out(image);
  const double dx = image.dx();
  const double dy = image.dy();
  const double inv = 1.0 / (supersample * supersample);
  parallel_for(0, image.ny, [&](std::size_t j) {
    for (std::size_t i = 0; i < image.nx; ++i) {
      const Vec2 c = image.pixel_center(i, j);
      double sum = 0.0;
      for (int b = 0; b < supersample; ++b) {
        for (int a = 0; a < supersample; ++a) {
          const Vec2 p{c.x + ((a + 0.5) / supersample - 0.5) * dx,
                       c.y + ((b + 0.5) / supersample - 0.5) * dy};
          sum += eval_f0(spec, p);
        }
      }
      out.at(i, j) = sum * inv;
    }
  });
  return out;
}

}  // namespace dynact
