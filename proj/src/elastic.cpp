#include "dynact/elastic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dynact/errors.hpp"
#include "dynact/parallel.hpp"

namespace dynact {

void MaterialParams::validate(const Grid2D& grid) const {
  std::ostringstream err;
  if (!(mu > 0.0) || !std::isfinite(mu)) err << "mu must be positive; ";
  if (!(lambda + 2.0 * mu > 0.0) || !std::isfinite(lambda)) err << "lambda + 2 mu must be positive; ";
  if (!(length_scale > 0.0) || !std::isfinite(length_scale)) err << "length_scale must be positive; ";
  if (rho0.size() != grid.size()) {
    err << "rho0 has " << rho0.size() << " entries, grid has " << grid.size() << "; ";
  } else {
    for (const std::size_t k : grid.interior_nodes()) {
      if (!(rho0[k] > 0.0) || !std::isfinite(rho0[k])) {
        err << "rho0 must be positive at interior node " << k << "; ";
        break;
      }
    }
  }
  if (const auto msg = err.str(); !msg.empty()) throw ConfigError("material: " + msg);
}

double cfl_dt(double lambda, double mu, double rho_min, double dx, double dy, double safety) {
  if (!(rho_min > 0.0)) throw ConfigError("cfl_dt: density must be positive");
  if (!(safety > 0.0 && safety <= 1.0)) throw ConfigError("cfl_dt: safety must lie in (0, 1]");
  if (!(dx > 0.0 && dy > 0.0)) throw ConfigError("cfl_dt: spacings must be positive");
  if (!(lambda + 2.0 * mu > 0.0)) throw ConfigError("cfl_dt: lambda + 2 mu must be positive");
  const double nu = std::sqrt((lambda + 2.0 * mu) / rho_min);
  return safety / (nu * (1.0 / dx + 1.0 / dy));
}

double cfl_dt(const MaterialParams& params, const Grid2D& grid, double safety) {
  if (params.rho0.size() != grid.size()) throw ConfigError("cfl_dt: rho0 size mismatch");
  double rho_min = std::numeric_limits<double>::infinity();
  for (const std::size_t k : grid.interior_nodes()) rho_min = std::min(rho_min, params.rho0[k]);
  if (grid.interior_nodes().empty()) throw ConfigError("cfl_dt: grid has no interior nodes");
  const double l = params.length_scale;
  return cfl_dt(params.lambda, params.mu, rho_min, l * grid.min_dx(), l * grid.min_dy(), safety);
}

void fill_ghosts(const Grid2D& grid, FieldLevel& level) {
  const auto& ghosts = grid.ghosts();
  parallel_for_range(0, ghosts.size(), [&](std::size_t first, std::size_t last) {
    for (std::size_t q = first; q < last; ++q) {
      const GhostStencil& g = ghosts[q];
      const auto& w = g.weights;
      level.u1[g.ghost] = w[0] * level.u1[g.node0] + w[1] * level.u1[g.node1] + w[2] * level.u1[g.node2];
      level.u2[g.ghost] = w[0] * level.u2[g.node0] + w[1] * level.u2[g.node1] + w[2] * level.u2[g.node2];
    }
  });
}

ElasticSolver::ElasticSolver(const Grid2D& grid, MaterialParams params, double dt)
    : grid_(grid), params_(std::move(params)), dt_(dt) {
  params_.validate(grid_);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("solver: dt must be positive");
  const double lam = params_.lambda;
  const double mu = params_.mu;
  const double l = params_.length_scale;
  const auto& nodes = grid_.interior_nodes();
  const auto& arms = grid_.interior_arms();
  coeff_.resize(nodes.size());
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    const double ks = dt * dt / params_.rho0[nodes[q]];
    const double xp = l * arms[q].x_plus, xm = l * arms[q].x_minus;
    const double yp = l * arms[q].y_plus, ym = l * arms[q].y_minus;
    const double sx = xp * xp + xm * xm;
    const double sy = yp * yp + ym * ym;
    const double dxr = (xp - xm) / (xp + xm);
    const double dyr = (yp - ym) / (yp + ym);
    Coefficients& c = coeff_[q];
    for (int comp = 0; comp < 2; ++comp) {
      const double cx = comp == 0 ? lam + 2.0 * mu : mu;
      const double cy = comp == 0 ? mu : lam + 2.0 * mu;
      c.centre[comp] = 2.0 * (1.0 - 2.0 * ks * (cy / sy + cx / sx));
      c.east[comp] = ks * (2.0 * cx / sx) * (1.0 - dxr);
      c.west[comp] = ks * (2.0 * cx / sx) * (1.0 + dxr);
      c.north[comp] = ks * (2.0 * cy / sy) * (1.0 - dyr);
      c.south[comp] = ks * (2.0 * cy / sy) * (1.0 + dyr);
    }
    c.mixed = ks * (lam + mu) / ((xp + xm) * (yp + ym));
    c.force = ks;
  }
}

void ElasticSolver::update(const FieldLevel* prev, const FieldLevel& cur, const FieldLevel* theta1,
                           double t, FieldLevel& next) const {
  const auto& nodes = grid_.interior_nodes();
  const std::size_t nx = grid_.nx();
  const double* a = cur.u1.data();
  const double* b = cur.u2.data();
  parallel_for_range(0, nodes.size(), [&](std::size_t first, std::size_t last) {
    for (std::size_t q = first; q < last; ++q) {
      const std::size_t k = nodes[q];
      const Coefficients& c = coeff_[q];
      Vec2 f{};
      if (params_.forcing) f = params_.forcing(t, k);
      const double s1 = c.centre[0] * a[k] + c.east[0] * a[k + 1] + c.west[0] * a[k - 1] +
                        c.north[0] * a[k + nx] + c.south[0] * a[k - nx] +
                        c.mixed * (b[k + nx + 1] - b[k + nx - 1] - b[k - nx + 1] + b[k - nx - 1]);
      const double s2 = c.centre[1] * b[k] + c.east[1] * b[k + 1] + c.west[1] * b[k - 1] +
                        c.north[1] * b[k + nx] + c.south[1] * b[k - nx] +
                        c.mixed * (a[k + nx + 1] - a[k + nx - 1] - a[k - nx + 1] + a[k - nx - 1]);
      if (prev) {
        next.u1[k] = c.force * f.x - prev->u1[k] + s1;
        next.u2[k] = c.force * f.y - prev->u2[k] + s2;
      } else {
        next.u1[k] = 0.5 * (c.force * f.x + s1) + dt_ * theta1->u1[k];
        next.u2[k] = 0.5 * (c.force * f.y + s2) + dt_ * theta1->u2[k];
      }
    }
  });
}

void ElasticSolver::interior_update(const FieldLevel& prev, const FieldLevel& cur, double t,
                                    FieldLevel& next) const {
  update(&prev, cur, nullptr, t, next);
}

void ElasticSolver::first_interior_update(const FieldLevel& u0, const FieldLevel& theta1, double t0,
                                          FieldLevel& next) const {
  update(nullptr, u0, &theta1, t0, next);
}

void apply_boundary(const Grid2D& grid, std::span<const Vec2> psi, FieldLevel& level) {
  const auto& bnodes = grid.boundary_nodes();
  if (psi.size() != bnodes.size()) {
    throw MismatchError("boundary data has " + std::to_string(psi.size()) + " values, grid has " +
                        std::to_string(bnodes.size()) + " boundary nodes");
  }
  for (std::size_t q = 0; q < bnodes.size(); ++q) level.set(bnodes[q], psi[q]);
  fill_ghosts(grid, level);
}

void check_finite(const Grid2D& grid, const FieldLevel& level, std::size_t step) {
  for (std::size_t k = 0; k < level.size(); ++k) {
    if (grid.classification(k) == NodeClass::Exterior) continue;
    if (!std::isfinite(level.u1[k]) || !std::isfinite(level.u2[k])) {
      std::ostringstream os;
      os << "solver produced a non-finite value at node (" << grid.col(k) << ", " << grid.row(k)
         << ") in step " << step << "; the time step probably violates the CFL bound";
      throw InstabilityError(os.str(), k, step);
    }
  }
}

namespace {

void require_size(const Grid2D& grid, const FieldLevel& f, const char* what) {
  if (f.size() != grid.size() || f.u2.size() != grid.size()) {
    throw MismatchError(std::string(what) + " does not match the grid size");
  }
}

}  // namespace

void step(const ElasticSolver& solver, const FieldLevel& prev, const FieldLevel& cur,
          std::size_t n, std::span<const Vec2> psi_next, FieldLevel& next) {
  const Grid2D& grid = solver.grid();
  require_size(grid, prev, "previous level");
  require_size(grid, cur, "current level");
  if (next.size() != grid.size()) next = FieldLevel(grid.size());
  solver.interior_update(prev, cur, static_cast<double>(n) * solver.dt(), next);
  apply_boundary(grid, psi_next, next);
  check_finite(grid, next, n + 1);
}

void first_step(const ElasticSolver& solver, const FieldLevel& u0, const InitialData& initial,
                std::span<const Vec2> psi_1, FieldLevel& next) {
  const Grid2D& grid = solver.grid();
  require_size(grid, u0, "initial level");
  FieldLevel zero;
  const FieldLevel* theta1 = &initial.theta1;
  if (initial.theta1.size() == 0) {
    zero = FieldLevel(grid.size());
    theta1 = &zero;
  }
  require_size(grid, *theta1, "initial velocity");
  if (next.size() != grid.size()) next = FieldLevel(grid.size());
  solver.first_interior_update(u0, *theta1, 0.0, next);
  apply_boundary(grid, psi_1, next);
  check_finite(grid, next, 1);
}

double solver_time_step(const MaterialParams& params, const Grid2D& grid,
                        const SolveOptions& options) {
  if (!(options.t_end > 0.0) || !std::isfinite(options.t_end)) {
    throw ConfigError("solve: t_end must be positive");
  }
  double bound = cfl_dt(params, grid, options.cfl_safety);
  if (options.max_dt) {
    if (!(*options.max_dt > 0.0)) throw ConfigError("solve: max_dt must be positive");
    bound = std::min(bound, *options.max_dt);
  }
  const double steps = std::ceil(options.t_end / bound);
  return options.t_end / steps;
}

DisplacementHistory solve(const Grid2D& grid, const MaterialParams& params,
                          const InitialData& initial, const BoundarySource& boundary,
                          const SolveOptions& options) {
  if (!boundary) throw ConfigError("solve: no boundary source");
  const double dt = solver_time_step(params, grid, options);
  const auto num_steps = static_cast<std::size_t>(std::llround(options.t_end / dt));
  ElasticSolver solver(grid, params, dt);

  // Output times mapped to the nearest step, each step recorded once.
  std::vector<std::size_t> wanted;
  for (const double t : options.output_times) {
    if (!(t >= 0.0 && t <= options.t_end * (1.0 + 1e-12))) {
      throw ConfigError("solve: output time outside [0, t_end]");
    }
    wanted.push_back(std::min<std::size_t>(num_steps, static_cast<std::size_t>(std::llround(t / dt))));
  }
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());

  const std::size_t n = grid.size();
  std::vector<Vec2> psi(grid.boundary_nodes().size());
  FieldLevel prev(n), cur(n), next(n);
  if (initial.theta0.size() != 0) {
    require_size(grid, initial.theta0, "initial displacement");
    cur = initial.theta0;
  }
  boundary(0.0, psi);
  apply_boundary(grid, psi, cur);
  check_finite(grid, cur, 0);

  DisplacementHistory history;
  auto next_wanted = wanted.begin();
  auto record = [&](std::size_t s, const FieldLevel& level) {
    if (next_wanted != wanted.end() && *next_wanted == s) {
      history.snapshots.push_back({static_cast<double>(s) * dt, level});
      ++next_wanted;
    }
  };
  record(0, cur);
  if (num_steps == 0) return history;

  const std::size_t check = std::max<std::size_t>(1, options.finite_check_interval);
  boundary(dt, psi);
  solver.first_interior_update(cur, initial.theta1.size() ? initial.theta1 : FieldLevel(n), 0.0, next);
  apply_boundary(grid, psi, next);
  check_finite(grid, next, 1);
  std::swap(prev, cur);
  std::swap(cur, next);
  record(1, cur);

  for (std::size_t s = 1; s < num_steps; ++s) {
    solver.interior_update(prev, cur, static_cast<double>(s) * dt, next);
    boundary(static_cast<double>(s + 1) * dt, psi);
    apply_boundary(grid, psi, next);
    if ((s + 1) % check == 0 || s + 1 == num_steps) check_finite(grid, next, s + 1);
    std::swap(prev, next);
    std::swap(prev, cur);
    record(s + 1, cur);
  }
  return history;
}

}  // namespace dynact
