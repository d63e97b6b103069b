#include "dynact/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <numeric>

#include "dynact/errors.hpp"

namespace dynact {

void BoundarySpec::validate() const {
  if (name.empty()) throw ConfigError("boundary scenario needs a name");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
    throw ConfigError("boundary '" + name + "': noise_std must be >= 0");
  }
  if (mode == BoundaryMode::Sparse && num_nodes < 3) {
    throw ConfigError("boundary '" + name + "': num_nodes must be at least 3");
  }
}

NormalRng::NormalRng(std::uint64_t seed) : engine_(seed) {}

double NormalRng::uniform() {
  // 53 random bits, shifted into (0, 1] so the logarithm stays finite.
  return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

double NormalRng::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

BoundaryData sample_boundary(const AffineMotion& motion, const Grid2D& grid,
                             std::span<const double> times) {
  BoundaryData bd;
  bd.times.assign(times.begin(), times.end());
  const auto& nodes = grid.boundary_nodes();
  bd.num_nodes = nodes.size();
  bd.values.resize(bd.times.size() * bd.num_nodes);
  for (std::size_t ti = 0; ti < bd.times.size(); ++ti) {
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const Vec2& x = grid.position(nodes[q]);
      bd.at(ti, q) = phi(motion, bd.times[ti], x) - x;
    }
  }
  return bd;
}

BoundaryData perturb(const BoundaryData& bd, const BoundarySpec& spec) {
  spec.validate();
  BoundaryData out = bd;
  if (spec.noise_std == 0.0) return out;
  NormalRng rng(spec.rng_seed);
  if (spec.noise_time_constant) {
    std::vector<Vec2> offset(bd.num_nodes);
    for (auto& o : offset) {
      o.x = spec.noise_std * rng.next();
      o.y = spec.noise_std * rng.next();
    }
    for (std::size_t ti = 0; ti < bd.times.size(); ++ti) {
      for (std::size_t q = 0; q < bd.num_nodes; ++q) out.at(ti, q) += offset[q];
    }
    return out;
  }
  for (auto& v : out.values) {
    v.x += spec.noise_std * rng.next();
    v.y += spec.noise_std * rng.next();
  }
  return out;
}

std::vector<std::size_t> sparse_node_selection(const Grid2D& grid, std::size_t num_nodes) {
  const auto& arc = grid.boundary_arc();
  const std::size_t total = arc.size();
  if (num_nodes < 3) throw ConfigError("sparsify: num_nodes must be at least 3");
  if (num_nodes > total) {
    throw ConfigError("sparsify: num_nodes " + std::to_string(num_nodes) + " exceeds the " +
                      std::to_string(total) + " boundary nodes");
  }
  const double perimeter = grid.domain().perimeter();
  auto periodic_distance = [&](double a, double b) {
    const double d = std::abs(a - b);
    return std::min(d, perimeter - d);
  };
  std::vector<char> taken(total, 0);
  std::vector<std::size_t> chosen;
  chosen.reserve(num_nodes);
  for (std::size_t k = 0; k < num_nodes; ++k) {
    const double target = perimeter * static_cast<double>(k) / static_cast<double>(num_nodes);
    std::size_t best = total;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < total; ++q) {
      if (taken[q]) continue;
      const double d = periodic_distance(arc[q], target);
      if (d < best_d) {
        best_d = d;
        best = q;
      }
    }
    taken[best] = 1;
    chosen.push_back(best);
  }
  std::sort(chosen.begin(), chosen.end(), [&](std::size_t a, std::size_t b) {
    return arc[a] < arc[b] || (arc[a] == arc[b] && a < b);
  });
  return chosen;
}

BoundaryData sparsify(const BoundaryData& bd, const BoundarySpec& spec, const Grid2D& grid) {
  spec.validate();
  if (bd.num_nodes != grid.boundary_nodes().size()) {
    throw MismatchError("sparsify: boundary data does not match the grid");
  }
  const auto kept = sparse_node_selection(grid, spec.num_nodes);
  const auto& arc = grid.boundary_arc();
  const double perimeter = grid.domain().perimeter();
  const std::size_t m = kept.size();
  std::vector<char> is_kept(bd.num_nodes, 0);
  for (const auto q : kept) is_kept[q] = 1;

  // For every dropped node: the enclosing kept pair and the weight of the second.
  struct Blend {
    std::size_t q, a, b;
    double w;
  };
  std::vector<Blend> blends;
  for (std::size_t q = 0; q < bd.num_nodes; ++q) {
    if (is_kept[q]) continue;
    const double s = arc[q];
    const auto it = std::upper_bound(kept.begin(), kept.end(), s,
                                     [&](double v, std::size_t idx) { return v < arc[idx]; });
    const std::size_t hi = static_cast<std::size_t>(it - kept.begin()) % m;
    const std::size_t lo = (hi + m - 1) % m;
    double gap = arc[kept[hi]] - arc[kept[lo]];
    double off = s - arc[kept[lo]];
    if (gap <= 0.0) gap += perimeter;
    if (off < 0.0) off += perimeter;
    const double w = gap > 0.0 ? off / gap : 0.0;
    blends.push_back({q, kept[lo], kept[hi], w});
  }

  BoundaryData out = bd;
  for (std::size_t ti = 0; ti < bd.times.size(); ++ti) {
    for (const auto& bl : blends) {
      out.at(ti, bl.q) = (1.0 - bl.w) * bd.at(ti, bl.a) + bl.w * bd.at(ti, bl.b);
    }
  }
  return out;
}

BoundaryData apply_boundary_spec(const BoundaryData& exact, const BoundarySpec& spec,
                                 const Grid2D& grid) {
  spec.validate();
  switch (spec.mode) {
    case BoundaryMode::Exact: return exact;
    case BoundaryMode::Noisy: return perturb(exact, spec);
    case BoundaryMode::Sparse: return sparsify(exact, spec, grid);
  }
  return exact;
}

BoundarySource interpolating_source(const BoundaryData& bd) {
  if (bd.times.empty()) throw ConfigError("boundary data has no observation times");
  auto data = std::make_shared<const BoundaryData>(bd);
  return [data](double t, std::span<Vec2> out) {
    const auto& times = data->times;
    if (out.size() != data->num_nodes) throw MismatchError("boundary source size mismatch");
    if (times.size() == 1 || t <= times.front()) {
      std::copy_n(data->row(0).begin(), out.size(), out.begin());
      return;
    }
    if (t >= times.back()) {
      std::copy_n(data->row(times.size() - 1).begin(), out.size(), out.begin());
      return;
    }
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i1 = static_cast<std::size_t>(it - times.begin());
    const std::size_t i0 = i1 - 1;
    const double w = (t - times[i0]) / (times[i1] - times[i0]);
    const auto a = data->row(i0);
    const auto b = data->row(i1);
    for (std::size_t q = 0; q < out.size(); ++q) out[q] = (1.0 - w) * a[q] + w * b[q];
  };
}

}  // namespace dynact
