#pragma once

#include <cstddef>
#include <vector>

#include "dynact/geometry.hpp"

namespace dynact {

/// Extent and resolution of a pixel grid. Pixel (i, j) is centred at
/// (xmin + i*dx, ymin + j*dy), i.e. the outermost pixel centres lie on the
/// extent boundary.
struct ImageSpec {
  std::size_t nx = 257;
  std::size_t ny = 257;
  double xmin = -1.0, xmax = 1.0;
  double ymin = -1.0, ymax = 1.0;

  double dx() const { return (xmax - xmin) / static_cast<double>(nx - 1); }
  double dy() const { return (ymax - ymin) / static_cast<double>(ny - 1); }
  Vec2 pixel_center(std::size_t i, std::size_t j) const {
    return {xmin + static_cast<double>(i) * dx(), ymin + static_cast<double>(j) * dy()};
  }
  std::size_t size() const { return nx * ny; }
  friend bool operator==(const ImageSpec&, const ImageSpec&) = default;
};

/// Row-major image, row j holds pixels with y = ymin + j*dy.
struct Image {
  ImageSpec spec;
  std::vector<double> values;

  Image() = default;
  explicit Image(const ImageSpec& s) : spec(s), values(s.size(), 0.0) {}

  double& at(std::size_t i, std::size_t j) { return values[j * spec.nx + i]; }
  double at(std::size_t i, std::size_t j) const { return values[j * spec.nx + i]; }
};

}  // namespace dynact
