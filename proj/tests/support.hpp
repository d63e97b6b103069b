#pragma once

#include <memory>

#include "dynact/domain.hpp"
#include "dynact/grid.hpp"
#include "dynact/phantom.hpp"

namespace testing_support {

inline dynact::PhantomSpec thorax() {
  dynact::PhantomSpec p;
  p.ellipses = {
      {{0.0, 0.0}, {0.80, 0.60}, 0.0, 1.0, "body"},
      {{-0.38, 0.05}, {0.24, 0.38}, 0.0, -0.7, "lung"},
      {{0.38, 0.05}, {0.24, 0.38}, 0.0, -0.7, "lung"},
      {{0.0, -0.38}, {0.09, 0.09}, 0.0, 1.0, "spine"},
      {{0.42, 0.15}, {0.05, 0.05}, 0.0, 0.7, "tumour"},
  };
  return p;
}

inline std::shared_ptr<const dynact::Grid2D> body_grid(std::size_t n) {
  auto domain = std::make_shared<dynact::EllipseDomain>(thorax().ellipses[0]);
  return std::make_shared<const dynact::Grid2D>(dynact::classify_nodes(
      dynact::uniform_coords(n, -1.0, 1.0), dynact::uniform_coords(n, -1.0, 1.0), domain));
}

// Grid (x {0,2,4}, y {-2,0,2}) over {y < x} clipped to [0,4] x [-2,2].
// A tilted normal snaps node1 off the grid, giving a non-collinear triple.
inline dynact::Grid2D figure_patch(double scale = 1.0, dynact::Vec2 shift = {},
                                   dynact::Vec2 normal = {-1.0, 1.0}) {
  auto domain = std::make_shared<dynact::ClippedHalfPlaneDomain>(
      shift, normal, shift.x, shift.x + 4.0 * scale, shift.y - 2.0 * scale,
      shift.y + 2.0 * scale);
  return dynact::classify_nodes({shift.x, shift.x + 2.0 * scale, shift.x + 4.0 * scale},
                                {shift.y - 2.0 * scale, shift.y, shift.y + 2.0 * scale}, domain);
}

}  // namespace testing_support
