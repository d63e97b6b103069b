#include <doctest.h>

#include <cmath>
#include <random>

#include "dynact/elastic.hpp"
#include "dynact/errors.hpp"
#include "dynact/parallel.hpp"
#include "manufactured.hpp"
#include "support.hpp"

using namespace dynact;
using testing_support::body_grid;
using testing_support::figure_patch;

namespace {

MaterialParams uniform_material(const Grid2D& g, double rho = 1050.0) {
  MaterialParams p;
  p.rho0.assign(g.size(), rho);
  return p;
}

// Per-component collinear extrapolation through the midpoint of node1 and
// node2, kept here only as an oracle for the figure layout.
double midpoint_rule(const Grid2D& g, const GhostStencil& s, const std::vector<double>& h, int comp) {
  const Vec2 p0 = g.position(s.node0);
  const Vec2 aux = 0.5 * (g.position(s.node1) + g.position(s.node2));
  const Vec2 pg = g.grid_position(s.ghost);
  const double h_aux = 0.5 * (h[s.node1] + h[s.node2]);
  const double x0 = comp == 0 ? p0.x : p0.y;
  const double xa = comp == 0 ? aux.x : aux.y;
  const double xg = comp == 0 ? pg.x : pg.y;
  return h[s.node0] + (h_aux - h[s.node0]) / (xa - x0) * (xg - x0);
}

Grid2D small_rectangle(std::size_t n = 17) {
  auto d = std::make_shared<RectangleDomain>(-0.5, 0.5, -0.5, 0.5);
  return classify_nodes(uniform_coords(n, -1.0, 1.0), uniform_coords(n, -1.0, 1.0), d);
}

}  // namespace

TEST_CASE("CFL bound examples") {
  CHECK(cfl_dt(0.0, 0.5, 1.0, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));

  const double nu = std::sqrt((3460.0 + 2.0 * 1480.0) / 1050.0);
  const double h = 2.0 / 256.0;
  const double expected = 1.0 / (nu * (1.0 / h + 1.0 / h));
  CHECK(cfl_dt(3460.0, 1480.0, 1050.0, h, h) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(nu == doctest::Approx(2.4727).epsilon(1e-4));

  const double dx = 0.01, dy = 0.02;
  CHECK(cfl_dt(3460.0, 1480.0, 1050.0, dx / 2.0, dy) ==
        doctest::Approx(1.0 / (nu * (2.0 / dx + 1.0 / dy))).epsilon(1e-14));
  CHECK(cfl_dt(3460.0, 1480.0, 1050.0, dx, dy, 0.9) ==
        doctest::Approx(0.9 * cfl_dt(3460.0, 1480.0, 1050.0, dx, dy)).epsilon(1e-15));

  CHECK_THROWS_AS(cfl_dt(1.0, 1.0, 0.0, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(cfl_dt(1.0, 1.0, -5.0, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(cfl_dt(1.0, 1.0, 1.0, 1.0, 1.0, 1.5), ConfigError);
  CHECK_THROWS_AS(cfl_dt(1.0, 1.0, 1.0, 1.0, 1.0, 0.0), ConfigError);
}

TEST_CASE("grid CFL uses the smallest interior density and spacing") {
  const auto g = body_grid(65);
  MaterialParams p = uniform_material(*g, 1850.0);
  p.rho0[g->interior_nodes()[10]] = 1050.0;
  p.rho0[0] = 1.0;  // exterior values are ignored
  CHECK(cfl_dt(p, *g, 0.9) ==
        doctest::Approx(cfl_dt(3460.0, 1480.0, 1050.0, 2.0 / 64, 2.0 / 64, 0.9)).epsilon(1e-14));
  p.rho0[g->interior_nodes()[3]] = 0.0;
  CHECK_THROWS_AS(p.validate(*g), ConfigError);
}

TEST_CASE("ghost extrapolation on the figure layout") {
  const Grid2D g = figure_patch();
  const GhostStencil& s = g.ghosts().at(0);
  FieldLevel f(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec2 p = g.position(k);
    f.u1[k] = p.x + 2.0 * p.y;
    f.u2[k] = 7.5;
  }
  fill_ghosts(g, f);
  CHECK(f.u1[s.ghost] == 4.0);
  CHECK(f.u2[s.ghost] == 7.5);
  CHECK(midpoint_rule(g, s, f.u1, 0) == 4.0);
  CHECK(midpoint_rule(g, s, f.u1, 1) == 4.0);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    for (std::size_t k = 0; k < g.size(); ++k) f.u1[k] = u(rng);
    fill_ghosts(g, f);
    CHECK(f.u1[s.ghost] == doctest::Approx(midpoint_rule(g, s, f.u1, 0)).epsilon(1e-13));
    CHECK(f.u1[s.ghost] == doctest::Approx(midpoint_rule(g, s, f.u1, 1)).epsilon(1e-13));
  }
}

TEST_CASE("ghost extrapolation reproduces affine fields on the body grid") {
  const auto g = body_grid(257);
  FieldLevel f(g->size());
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double a = u(rng), b = u(rng), c = u(rng), d = u(rng), e = u(rng), k0 = u(rng);
    for (std::size_t k = 0; k < g->size(); ++k) {
      const Vec2 p = g->position(k);
      f.u1[k] = a + b * p.x + c * p.y;
      f.u2[k] = d + e * p.x + k0 * p.y;
    }
    fill_ghosts(*g, f);
    double err = 0.0;
    for (const auto& s : g->ghosts()) {
      const Vec2 p = g->grid_position(s.ghost);
      err = std::max(err, std::abs(f.u1[s.ghost] - (a + b * p.x + c * p.y)));
      err = std::max(err, std::abs(f.u2[s.ghost] - (d + e * p.x + k0 * p.y)));
    }
    CHECK(err < 1e-13);
  }
}

TEST_CASE("ghost extrapolation is second order on quadratic data") {
  auto ghost_error = [](double h) {
    const Vec2 shift{0.3, -0.2};
    const Grid2D g = figure_patch(h, shift, {-1.0, 1.3});
    FieldLevel f(g.size());
    auto q = [](const Vec2& p) { return p.x * p.x + p.y * p.y; };
    for (std::size_t k = 0; k < g.size(); ++k) f.u1[k] = q(g.position(k));
    fill_ghosts(g, f);
    const auto& s = g.ghosts().at(0);
    return std::abs(f.u1[s.ghost] - q(g.grid_position(s.ghost)));
  };
  double prev = ghost_error(0.1);
  CHECK(prev > 0.0);
  for (double h : {0.05, 0.025, 0.0125}) {
    const double e = ghost_error(h);
    CHECK(prev / e >= 3.6);
    prev = e;
  }
}

TEST_CASE("constant state is a fixed point of one step") {
  const Grid2D g = small_rectangle();
  const ElasticSolver solver(g, uniform_material(g), 1e-3);
  FieldLevel c(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) c.set(k, {0.3, -0.1});
  std::vector<Vec2> psi(g.boundary_nodes().size(), Vec2{0.3, -0.1});
  FieldLevel next;
  step(solver, c, c, 5, psi, next);
  for (std::size_t k : g.interior_nodes()) {
    CHECK(next.u1[k] == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(next.u2[k] == doctest::Approx(-0.1).epsilon(1e-14));
  }
}

TEST_CASE("quiescent data stays exactly zero") {
  const auto g = body_grid(65);
  SolveOptions opt;
  opt.t_end = 0.5;
  opt.output_times = {0.0, 0.25, 0.5};
  const auto hist = solve(*g, uniform_material(*g), {}, [](double, std::span<Vec2> out) {
    std::fill(out.begin(), out.end(), Vec2{});
  }, opt);
  REQUIRE(hist.snapshots.size() == 3);
  for (const auto& s : hist.snapshots) {
    for (std::size_t k = 0; k < g->size(); ++k) {
      CHECK(s.u.u1[k] == 0.0);
      CHECK(s.u.u2[k] == 0.0);
    }
  }
}

TEST_CASE("spatially constant quadratic motion is reproduced") {
  const auto g = body_grid(65);
  const double c = 0.5;
  MaterialParams p = uniform_material(*g);
  p.forcing = [&](double, std::size_t k) { return Vec2{2.0 * p.rho0[k] * c, 0.0}; };
  SolveOptions opt;
  opt.t_end = 0.4;
  opt.output_times = {0.1, 0.2, 0.3, 0.4};
  const auto hist = solve(*g, p, {}, [&](double t, std::span<Vec2> out) {
    std::fill(out.begin(), out.end(), Vec2{c * t * t, 0.0});
  }, opt);
  REQUIRE(hist.snapshots.size() == 4);
  for (const auto& s : hist.snapshots) {
    double err = 0.0;
    for (std::size_t k = 0; k < g->size(); ++k) {
      if (g->classification(k) == NodeClass::Exterior) continue;
      err = std::max(err, std::abs(s.u.u1[k] - c * s.time * s.time) + std::abs(s.u.u2[k]));
    }
    CHECK(err < 1e-10);
  }
}

TEST_CASE("first step examples") {
  const Grid2D g = small_rectangle();
  const ElasticSolver solver(g, uniform_material(g), 2e-3);
  const std::vector<Vec2> zero_psi(g.boundary_nodes().size());

  SUBCASE("zero data") {
    FieldLevel next;
    first_step(solver, FieldLevel(g.size()), {}, zero_psi, next);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(next.at(k) == Vec2{});
  }
  SUBCASE("uniform velocity on a zero field") {
    InitialData init;
    init.theta1 = FieldLevel(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) init.theta1.set(k, {0.7, 0.0});
    FieldLevel next;
    first_step(solver, FieldLevel(g.size()), init, zero_psi, next);
    for (std::size_t k : g.interior_nodes()) {
      CHECK(next.u1[k] == doctest::Approx(2e-3 * 0.7).epsilon(1e-15));
      CHECK(next.u2[k] == 0.0);
    }
  }
  SUBCASE("zero velocity gives the mirror level") {
    FieldLevel u0(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Vec2 p = g.position(k);
      u0.set(k, {std::sin(3.0 * p.x) * p.y, p.x * p.x});
    }
    FieldLevel u1(g.size()), back(g.size());
    solver.first_interior_update(u0, FieldLevel(g.size()), 0.0, u1);
    solver.interior_update(u1, u0, 0.0, back);
    for (std::size_t k : g.interior_nodes()) {
      CHECK(back.u1[k] == doctest::Approx(u1.u1[k]).epsilon(1e-14));
      CHECK(back.u2[k] == doctest::Approx(u1.u2[k]).epsilon(1e-14));
    }
  }
}

TEST_CASE("boundary nodes carry the prescribed values at every snapshot") {
  const auto g = body_grid(65);
  auto psi = [&](double t, std::size_t q) {
    const Vec2 p = g->position(g->boundary_nodes()[q]);
    return Vec2{0.01 * std::sin(t) * p.x, 0.02 * t * p.y};
  };
  SolveOptions opt;
  opt.t_end = 1.0;
  for (int i = 0; i <= 10; ++i) opt.output_times.push_back(0.1 * i);
  const auto hist = solve(*g, uniform_material(*g), {}, [&](double t, std::span<Vec2> out) {
    for (std::size_t q = 0; q < out.size(); ++q) out[q] = psi(t, q);
  }, opt);
  for (const auto& s : hist.snapshots) {
    for (std::size_t q = 0; q < g->boundary_nodes().size(); ++q) {
      CHECK(s.u.at(g->boundary_nodes()[q]) == psi(s.time, q));
    }
  }
}

TEST_CASE("solver output does not depend on the thread count") {
  const auto g = body_grid(129);
  auto source = [&](double t, std::span<Vec2> out) {
    for (std::size_t q = 0; q < out.size(); ++q) {
      const Vec2 p = g->position(g->boundary_nodes()[q]);
      out[q] = {0.05 * std::sin(2.0 * t) * p.x, -0.03 * t * p.y * p.x};
    }
  };
  MaterialParams p = uniform_material(*g);
  SolveOptions opt;
  opt.t_end = 2.0;
  opt.output_times = {1.0, 2.0};
  const std::size_t saved = max_threads();
  set_max_threads(1);
  const auto a = solve(*g, p, {}, source, opt);
  set_max_threads(4);
  const auto b = solve(*g, p, {}, source, opt);
  set_max_threads(saved);
  REQUIRE(a.snapshots.size() == b.snapshots.size());
  for (std::size_t i = 0; i < a.snapshots.size(); ++i) CHECK(a.snapshots[i].u == b.snapshots[i].u);
}

TEST_CASE("steps far beyond the CFL bound raise an instability error") {
  const Grid2D g = small_rectangle(33);
  MaterialParams p = uniform_material(g, 1.0);
  const double dt = 20.0 * cfl_dt(p, g);
  const ElasticSolver solver(g, p, dt);
  FieldLevel prev(g.size()), cur(g.size()), next(g.size());
  for (std::size_t k : g.interior_nodes()) cur.u1[k] = (k % 2) ? 1e-3 : -1e-3;
  const std::vector<Vec2> psi(g.boundary_nodes().size());
  bool thrown = false;
  try {
    for (std::size_t n = 1; n < 2000; ++n) {
      step(solver, prev, cur, n, psi, next);
      std::swap(prev, cur);
      std::swap(cur, next);
    }
  } catch (const InstabilityError& e) {
    thrown = true;
    CHECK(e.exit_code() == 4);
    CHECK(g.classification(e.node()) != NodeClass::Exterior);
  }
  CHECK(thrown);
}

TEST_CASE("manufactured wave converges at second order") {
  const auto e1 = testing_support::manufactured_wave(33);
  const auto e2 = testing_support::manufactured_wave(65);
  const auto e3 = testing_support::manufactured_wave(129);
  const double p1 = std::log2(e1.max_error / e2.max_error);
  const double p2 = std::log2(e2.max_error / e3.max_error);
  MESSAGE("orders " << p1 << " " << p2);
  CHECK(p1 >= 1.9);
  CHECK(p2 >= 1.9);
}

TEST_CASE("boundary data size mismatch is reported") {
  const Grid2D g = small_rectangle();
  FieldLevel f(g.size());
  std::vector<Vec2> psi(3);
  CHECK_THROWS_AS(apply_boundary(g, psi, f), MismatchError);
}
