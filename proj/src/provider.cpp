#include "dynact/provider.hpp"

#include <algorithm>
#include <numeric>

#include "dynact/errors.hpp"

namespace dynact {
namespace {

/// Cell index and weight for coordinate v on an ascending axis, clamped.
std::pair<std::size_t, double> locate(const std::vector<double>& axis, double v) {
  if (v <= axis.front()) return {0, 0.0};
  if (v >= axis.back()) return {axis.size() - 2, 1.0};
  const auto it = std::upper_bound(axis.begin(), axis.end(), v);
  const auto i = static_cast<std::size_t>(it - axis.begin()) - 1;
  return {i, (v - axis[i]) / (axis[i + 1] - axis[i])};
}

}  // namespace

FieldMotion::FieldMotion(std::shared_ptr<const Grid2D> grid, const DisplacementHistory& history)
    : grid_(std::move(grid)) {
  if (!grid_) throw ConfigError("field motion: no grid");
  if (history.snapshots.empty()) throw ConfigError("field motion: empty displacement history");
  const Grid2D& g = *grid_;
  const auto& bnodes = g.boundary_nodes();
  if (bnodes.size() < 2) throw GeometryError("field motion: fewer than two boundary nodes");

  // Boundary nodes in arc order for the periodic extension.
  std::vector<std::size_t> order(bnodes.size());
  std::iota(order.begin(), order.end(), 0);
  const auto& arc = g.boundary_arc();
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return arc[a] < arc[b]; });
  const double perimeter = g.domain().perimeter();

  struct Blend {
    std::size_t node, a, b;
    double w;
  };
  std::vector<Blend> blends;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const NodeClass c = g.classification(k);
    if (c == NodeClass::Interior || c == NodeClass::Boundary) continue;
    const Vec2 p = g.domain().closest_boundary_point(g.grid_position(k));
    const double s = g.domain().arc_position(p);
    const auto it = std::upper_bound(order.begin(), order.end(), s,
                                     [&](double v, std::size_t q) { return v < arc[q]; });
    const std::size_t m = order.size();
    const std::size_t hi = static_cast<std::size_t>(it - order.begin()) % m;
    const std::size_t lo = (hi + m - 1) % m;
    double gap = arc[order[hi]] - arc[order[lo]];
    double off = s - arc[order[lo]];
    if (gap <= 0.0) gap += perimeter;
    if (off < 0.0) off += perimeter;
    blends.push_back({k, bnodes[order[lo]], bnodes[order[hi]], gap > 0.0 ? off / gap : 0.0});
  }

  for (const auto& snap : history.snapshots) {
    if (snap.u.size() != g.size()) throw MismatchError("field motion: snapshot size mismatch");
    if (!times_.empty() && !(snap.time > times_.back())) {
      throw ConfigError("field motion: snapshot times must be strictly ascending");
    }
    FieldLevel f = snap.u;
    for (const auto& bl : blends) {
      f.u1[bl.node] = (1.0 - bl.w) * snap.u.u1[bl.a] + bl.w * snap.u.u1[bl.b];
      f.u2[bl.node] = (1.0 - bl.w) * snap.u.u2[bl.a] + bl.w * snap.u.u2[bl.b];
    }
    times_.push_back(snap.time);
    fields_.push_back(std::move(f));
  }
}

FieldLevel FieldMotion::at_time(double t) const {
  if (times_.size() == 1 || t <= times_.front()) return fields_.front();
  if (t >= times_.back()) return fields_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const auto i1 = static_cast<std::size_t>(it - times_.begin());
  const std::size_t i0 = i1 - 1;
  const double w = (t - times_[i0]) / (times_[i1] - times_[i0]);
  if (w == 0.0) return fields_[i0];
  const FieldLevel& a = fields_[i0];
  const FieldLevel& b = fields_[i1];
  FieldLevel out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    out.u1[k] = (1.0 - w) * a.u1[k] + w * b.u1[k];
    out.u2[k] = (1.0 - w) * a.u2[k] + w * b.u2[k];
  }
  return out;
}

Vec2 FieldMotion::interpolate(const FieldLevel& field, const Vec2& x) const {
  const Grid2D& g = *grid_;
  const auto [i, wx] = locate(g.x_coords(), x.x);
  const auto [j, wy] = locate(g.y_coords(), x.y);
  const std::size_t k00 = g.index(i, j);
  const std::size_t k10 = k00 + 1;
  const std::size_t k01 = k00 + g.nx();
  const std::size_t k11 = k01 + 1;
  const double w00 = (1.0 - wx) * (1.0 - wy);
  const double w10 = wx * (1.0 - wy);
  const double w01 = (1.0 - wx) * wy;
  const double w11 = wx * wy;
  return {w00 * field.u1[k00] + w10 * field.u1[k10] + w01 * field.u1[k01] + w11 * field.u1[k11],
          w00 * field.u2[k00] + w10 * field.u2[k10] + w01 * field.u2[k01] + w11 * field.u2[k11]};
}

DeformationProvider DeformationProvider::analytic(const AffineMotion& motion) {
  DeformationProvider p;
  p.source_ = motion;
  return p;
}

DeformationProvider DeformationProvider::from_field(std::shared_ptr<const Grid2D> grid,
                                                    const DisplacementHistory& history) {
  DeformationProvider p;
  p.source_ = std::make_shared<const FieldMotion>(std::move(grid), history);
  return p;
}

bool DeformationProvider::is_identity() const {
  const auto* m = std::get_if<AffineMotion>(&source_);
  return m && m->is_identity();
}

DeformationProvider::Frame DeformationProvider::frame(double t) const {
  Frame f;
  if (const auto* m = std::get_if<AffineMotion>(&source_)) {
    f.map_ = m->at(t);
  } else {
    const auto& field = std::get<std::shared_ptr<const FieldMotion>>(source_);
    f.field_ = field.get();
    f.u_ = field->at_time(t);
  }
  return f;
}

Vec2 DeformationProvider::Frame::operator()(const Vec2& x) const {
  if (field_) return x + field_->interpolate(u_, x);
  return map_(x);
}

}  // namespace dynact
