#include "dynact/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dynact/errors.hpp"

namespace dynact {

std::vector<double> uniform_coords(std::size_t n, double lo, double hi) {
  if (n < 2) throw ConfigError("uniform_coords: need at least two nodes");
  if (!(hi > lo)) throw ConfigError("uniform_coords: empty interval");
  std::vector<double> c(n);
  const double span = hi - lo;
  const auto last = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) c[i] = lo + span * (static_cast<double>(i) / last);
  c.back() = hi;
  return c;
}

double Grid2D::min_dx() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < x_.size(); ++i) m = std::min(m, x_[i] - x_[i - 1]);
  return m;
}

double Grid2D::min_dy() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < y_.size(); ++j) m = std::min(m, y_[j] - y_[j - 1]);
  return m;
}

namespace {

void check_coords(const std::vector<double>& c, const char* name) {
  if (c.size() < 3) {
    throw ConfigError(std::string("grid: ") + name + " needs at least 3 coordinates");
  }
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (!(c[i] > c[i - 1]) || !std::isfinite(c[i])) {
      throw ConfigError(std::string("grid: ") + name + " must be finite and strictly ascending");
    }
  }
}

struct Neighbour {
  int di, dj;
};
constexpr Neighbour kAxial[4] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
constexpr Neighbour kDiagonal[4] = {{-1, -1}, {1, -1}, {-1, 1}, {1, 1}};

}  // namespace

Grid2D classify_nodes(std::vector<double> x_coords, std::vector<double> y_coords,
                      std::shared_ptr<const Domain> domain, const ClassifyOptions& options) {
  if (!domain) throw ConfigError("classify_nodes: no domain");
  check_coords(x_coords, "x_coords");
  check_coords(y_coords, "y_coords");
  if (!(options.min_arm_fraction >= 0.0 && options.min_arm_fraction < 1.0)) {
    throw ConfigError("classify_nodes: min_arm_fraction must lie in [0, 1)");
  }

  Grid2D g;
  g.x_ = std::move(x_coords);
  g.y_ = std::move(y_coords);
  g.domain_ = std::move(domain);
  const Domain& dom = *g.domain_;
  const std::size_t nx = g.nx();
  const std::size_t ny = g.ny();
  const std::size_t n = g.size();

  g.position_.resize(n);
  std::vector<char> candidate(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    g.position_[k] = g.grid_position(k);
    candidate[k] = dom.inside(g.position_[k]) ? 1 : 0;
    if (candidate[k]) {
      const std::size_t i = g.col(k);
      const std::size_t j = g.row(k);
      if (i == 0 || j == 0 || i + 1 == nx || j + 1 == ny) {
        throw GeometryError("classify_nodes: domain reaches the edge of the grid");
      }
    }
  }

  auto neighbour = [&](std::size_t k, Neighbour d) {
    return g.index(g.col(k) + d.di, g.row(k) + d.dj);
  };
  auto spacing = [&](std::size_t k, Neighbour d) {
    const std::size_t i = g.col(k);
    const std::size_t j = g.row(k);
    if (d.di != 0) return d.di < 0 ? g.x_[i] - g.x_[i - 1] : g.x_[i + 1] - g.x_[i];
    return d.dj < 0 ? g.y_[j] - g.y_[j - 1] : g.y_[j + 1] - g.y_[j];
  };

  // Nodes too close to the boundary along an axis are moved onto it. One
  // demotion never shortens a neighbour's arm, but loop until stable anyway.
  std::vector<char> demoted(n, 0);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t k = 0; k < n; ++k) {
      if (!candidate[k]) continue;
      double best = std::numeric_limits<double>::infinity();
      Vec2 snap{};
      bool too_short = false;
      for (const auto d : kAxial) {
        const std::size_t nb = neighbour(k, d);
        if (candidate[nb]) continue;
        const Vec2 c = dom.crossing(g.grid_position(k), g.grid_position(nb));
        const double arm = d.di != 0 ? std::abs(c.x - g.grid_position(k).x)
                                     : std::abs(c.y - g.grid_position(k).y);
        if (arm < options.min_arm_fraction * spacing(k, d)) too_short = true;
        if (arm < best) {
          best = arm;
          snap = c;
        }
      }
      if (too_short) {
        candidate[k] = 0;
        demoted[k] = 1;
        g.position_[k] = snap;
        changed = true;
      }
    }
  }

  g.class_.assign(n, NodeClass::Exterior);
  for (std::size_t k = 0; k < n; ++k) {
    if (candidate[k]) {
      g.class_[k] = NodeClass::Interior;
      g.interior_.push_back(k);
    } else if (demoted[k]) {
      g.class_[k] = NodeClass::Boundary;
    }
  }

  // Axial references: snap along the axis. When several interior nodes read
  // the same outside node, keep the crossing closest to its grid point.
  for (const std::size_t k : g.interior_) {
    for (const auto d : kAxial) {
      const std::size_t nb = neighbour(k, d);
      if (g.class_[nb] == NodeClass::Interior || demoted[nb]) continue;
      const Vec2 gp = g.grid_position(nb);
      const Vec2 c = dom.crossing(g.grid_position(k), gp);
      if (g.class_[nb] != NodeClass::Boundary || norm(c - gp) < norm(g.position_[nb] - gp)) {
        g.position_[nb] = c;
      }
      g.class_[nb] = NodeClass::Boundary;
    }
  }

  // Diagonal references.
  std::vector<char> ghost(n, 0);
  for (const std::size_t k : g.interior_) {
    for (const auto d : kDiagonal) {
      const std::size_t nb = neighbour(k, d);
      if (g.class_[nb] != NodeClass::Exterior) continue;
      if (dom.on_boundary(g.grid_position(nb))) {
        g.class_[nb] = NodeClass::Boundary;
      } else {
        ghost[nb] = 1;
      }
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (ghost[k] && g.class_[k] == NodeClass::Exterior) g.class_[k] = NodeClass::Ghost;
  }

  for (std::size_t k = 0; k < n; ++k) {
    if (g.class_[k] == NodeClass::Boundary) {
      g.boundary_.push_back(k);
      g.boundary_arc_.push_back(dom.arc_position(g.position_[k]));
    }
  }

  // Ghost triples: node0 a diagonal interior neighbour, node1/node2 the two
  // nodes adjacent to both. Among admissible choices take the best conditioned.
  for (std::size_t k = 0; k < n; ++k) {
    if (g.class_[k] != NodeClass::Ghost) continue;
    GhostStencil best{};
    double best_quality = 0.0;
    for (const auto d : kDiagonal) {
      const long i0 = static_cast<long>(g.col(k)) + d.di;
      const long j0 = static_cast<long>(g.row(k)) + d.dj;
      if (i0 < 0 || j0 < 0 || i0 >= static_cast<long>(nx) || j0 >= static_cast<long>(ny)) continue;
      const std::size_t k0 = g.index(i0, j0);
      if (g.class_[k0] != NodeClass::Interior) continue;
      const std::size_t k1 = g.index(i0, g.row(k));
      const std::size_t k2 = g.index(g.col(k), j0);
      if (g.class_[k1] != NodeClass::Boundary || g.class_[k2] != NodeClass::Boundary) continue;
      const Vec2 p0 = g.position_[k0];
      const Vec2 e1 = g.position_[k1] - p0;
      const Vec2 e2 = g.position_[k2] - p0;
      const double det = e1.x * e2.y - e1.y * e2.x;
      const double quality = std::abs(det) / (norm(e1) * norm(e2));
      if (!(quality > 1e-6) || quality <= best_quality) continue;
      const Vec2 r = g.position_[k] - p0;
      const double c1 = (r.x * e2.y - r.y * e2.x) / det;
      const double c2 = (e1.x * r.y - e1.y * r.x) / det;
      best = GhostStencil{k, k0, k1, k2, {1.0 - c1 - c2, c1, c2}};
      best_quality = quality;
    }
    if (best_quality == 0.0) {
      std::ostringstream os;
      os << "classify_nodes: ghost node (" << g.col(k) << ", " << g.row(k)
         << ") has no usable extrapolation triple; grid too coarse for the domain";
      throw GeometryError(os.str());
    }
    g.ghosts_.push_back(best);
  }

  g.arms_.reserve(g.interior_.size());
  for (const std::size_t k : g.interior_) {
    const Vec2 p = g.grid_position(k);
    double arm[4];
    for (int a = 0; a < 4; ++a) {
      const auto d = kAxial[a];
      const std::size_t nb = neighbour(k, d);
      arm[a] = spacing(k, d);
      if (g.class_[nb] == NodeClass::Boundary) {
        const Vec2& q = g.position_[nb];
        if (d.di != 0 && q.y == p.y) arm[a] = std::abs(q.x - p.x);
        if (d.dj != 0 && q.x == p.x) arm[a] = std::abs(q.y - p.y);
      }
    }
    g.arms_.push_back(StencilArms{arm[0], arm[1], arm[2], arm[3]});
  }
  return g;
}

}  // namespace dynact
