#include <doctest.h>

#include <cmath>
#include <random>

#include "dynact/errors.hpp"
#include "dynact/provider.hpp"
#include "support.hpp"

using namespace dynact;
using testing_support::body_grid;

namespace {

DisplacementHistory history_of(const Grid2D& g, std::vector<double> times,
                               const std::function<Vec2(double, const Vec2&)>& u) {
  DisplacementHistory h;
  for (double t : times) {
    Snapshot s{t, FieldLevel(g.size())};
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (g.classification(k) == NodeClass::Interior || g.classification(k) == NodeClass::Boundary) {
        s.u.set(k, u(t, g.position(k)));
      }
    }
    h.snapshots.push_back(std::move(s));
  }
  return h;
}

bool all_corners_interior(const Grid2D& g, std::size_t i, std::size_t j) {
  for (std::size_t dj = 0; dj < 2; ++dj)
    for (std::size_t di = 0; di < 2; ++di)
      if (g.classification(g.index(i + di, j + dj)) != NodeClass::Interior) return false;
  return true;
}

}  // namespace

TEST_CASE("identity and analytic providers") {
  const auto id = DeformationProvider::identity();
  CHECK(id.is_identity());
  CHECK(id.eval(3.0, {0.2, 0.1}) == Vec2{0.2, 0.1});

  const auto m = AffineMotion::breathing();
  const auto an = DeformationProvider::analytic(m);
  CHECK_FALSE(an.is_identity());
  const Vec2 x{0.3, -0.4};
  CHECK(an.eval(0.0, x) == x);
  CHECK(norm(an.eval(40.0, x) - phi(m, 40.0, x)) < 1e-15);
}

TEST_CASE("zero field evaluates to the identity everywhere") {
  const auto g = body_grid(65);
  const auto p = DeformationProvider::from_field(g, history_of(*g, {0.0, 1.0}, [](double, const Vec2&) {
    return Vec2{};
  }));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int k = 0; k < 200; ++k) {
    const Vec2 x{u(rng), u(rng)};
    CHECK(p.eval(0.5 * (u(rng) + 1.2), x) == x);
  }
}

TEST_CASE("stored values are returned at nodes and snapshot times") {
  const auto g = body_grid(65);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  DisplacementHistory h = history_of(*g, {0.0, 1.0, 2.5}, [&](double t, const Vec2&) {
    return t == 0.0 ? Vec2{} : Vec2{u(rng), u(rng)};
  });
  const auto p = DeformationProvider::from_field(g, h);
  for (std::size_t s = 0; s < h.snapshots.size(); ++s) {
    for (std::size_t k : g->interior_nodes()) {
      const Vec2 x = g->grid_position(k);
      const Vec2 y = p.eval(h.snapshots[s].time, x);
      CHECK(norm(y - (x + h.snapshots[s].u.at(k))) < 1e-15);
    }
  }
  for (std::size_t k : g->interior_nodes()) {
    const Vec2 x = g->grid_position(k);
    CHECK(norm(p.eval(0.0, x) - x) < 1e-12);
  }
}

TEST_CASE("affine fields at two snapshots are blended exactly") {
  const auto g = body_grid(65);
  auto u = [](double t, const Vec2& x) {
    return t == 0.0 ? Vec2{0.01 + 0.02 * x.x - 0.03 * x.y, -0.02 * x.x + 0.05}
                    : Vec2{-0.04 * x.y + 0.01, 0.03 * x.x + 0.02 * x.y};
  };
  const auto p = DeformationProvider::from_field(g, history_of(*g, {0.0, 2.0}, u));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> f(0.0, 1.0);
  const auto& xc = g->x_coords();
  const auto& yc = g->y_coords();
  int checked = 0;
  for (std::size_t j = 0; j + 1 < g->ny(); ++j) {
    for (std::size_t i = 0; i + 1 < g->nx(); ++i) {
      if (!all_corners_interior(*g, i, j)) continue;
      const Vec2 x{xc[i] + f(rng) * (xc[i + 1] - xc[i]), yc[j] + f(rng) * (yc[j + 1] - yc[j])};
      const Vec2 expected = x + 0.5 * (u(0.0, x) + u(2.0, x));
      CHECK(norm(p.eval(1.0, x) - expected) < 1e-14);
      ++checked;
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("field evaluation is continuous across cell edges and outside the domain") {
  const auto g = body_grid(65);
  const auto p = DeformationProvider::from_field(g, history_of(*g, {0.0, 1.0}, [](double t, const Vec2& x) {
    return Vec2{0.1 * t * std::sin(3.0 * x.y), 0.05 * t * x.x * x.x};
  }));
  const auto frame = p.frame(0.7);
  for (std::size_t i = 1; i + 1 < g->nx(); i += 3) {
    for (double y = -1.0; y <= 1.0; y += 0.05) {
      for (double eps : {1e-6, 1e-9}) {
        const Vec2 a = frame({g->x_coords()[i] - eps, y}) - Vec2{g->x_coords()[i] - eps, y};
        const Vec2 b = frame({g->x_coords()[i] + eps, y}) - Vec2{g->x_coords()[i] + eps, y};
        CHECK(norm(a - b) < 100.0 * eps);
      }
    }
  }
  // Outside the grid box the displacement is frozen at the nearest box point.
  const Vec2 far = frame({3.0, 0.2}) - Vec2{3.0, 0.2};
  const Vec2 edge = frame({1.0, 0.2}) - Vec2{1.0, 0.2};
  CHECK(norm(far - edge) < 1e-15);
}

TEST_CASE("malformed histories are rejected") {
  const auto g = body_grid(33);
  CHECK_THROWS_AS(DeformationProvider::from_field(g, {}), ConfigError);
  auto h = history_of(*g, {1.0, 0.0}, [](double, const Vec2&) { return Vec2{}; });
  CHECK_THROWS_AS(DeformationProvider::from_field(g, h), ConfigError);
  h.snapshots[1].u = FieldLevel(3);
  CHECK_THROWS_AS(DeformationProvider::from_field(g, h), MismatchError);
}
