#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dynact/geometry.hpp"
#include "dynact/grid.hpp"

namespace dynact {

/// Body force density at (time, node index), in N/m^3.
using Forcing = std::function<Vec2(double t, std::size_t node)>;

struct MaterialParams {
  double lambda = 3.46e3;     // Pa
  double mu = 1.48e3;         // Pa
  std::vector<double> rho0;   // kg/m^3 per grid node; only interior values are read
  double length_scale = 1.0;  // metres per domain unit
  Forcing forcing;            // empty means zero

  /// Throws ConfigError on invalid constants or densities.
  void validate(const Grid2D& grid) const;
};

/// One time level, structure of arrays over all grid nodes.
struct FieldLevel {
  std::vector<double> u1, u2;

  FieldLevel() = default;
  explicit FieldLevel(std::size_t n) : u1(n, 0.0), u2(n, 0.0) {}
  std::size_t size() const { return u1.size(); }
  Vec2 at(std::size_t k) const { return {u1[k], u2[k]}; }
  void set(std::size_t k, const Vec2& v) {
    u1[k] = v.x;
    u2[k] = v.y;
  }

  friend bool operator==(const FieldLevel&, const FieldLevel&) = default;
};

struct InitialData {
  FieldLevel theta0;  // displacement at t = 0
  FieldLevel theta1;  // velocity at t = 0
};

/// Writes prescribed boundary displacements at time t, one entry per element of
/// Grid2D::boundary_nodes().
using BoundarySource = std::function<void(double t, std::span<Vec2> out)>;

struct Snapshot {
  double time = 0.0;
  FieldLevel u;
};

struct DisplacementHistory {
  std::vector<Snapshot> snapshots;  // ascending time
};

/// Largest stable step: safety / (nu (1/dx + 1/dy)), nu = sqrt((lambda + 2 mu) / rho_min).
double cfl_dt(double lambda, double mu, double rho_min, double dx, double dy, double safety = 1.0);
/// Same bound using the grid's smallest spacings (scaled to metres) and the
/// smallest interior density.
double cfl_dt(const MaterialParams& params, const Grid2D& grid, double safety = 1.0);

/// Extrapolates every ghost node from its triple.
void fill_ghosts(const Grid2D& grid, FieldLevel& level);

/// Explicit nine-point scheme for the Navier-Cauchy equations with fixed dt.
/// The grid must outlive the solver.
class ElasticSolver {
 public:
  ElasticSolver(const Grid2D& grid, MaterialParams params, double dt);

  const Grid2D& grid() const { return grid_; }
  const MaterialParams& params() const { return params_; }
  double dt() const { return dt_; }

  /// Interior values of the next level from levels n-1 and n (time t_n).
  /// Boundary, ghost and exterior entries of `next` are left untouched.
  void interior_update(const FieldLevel& prev, const FieldLevel& cur, double t,
                       FieldLevel& next) const;
  /// First step with the mirror rule u^{-1} = u^1 - 2 dt theta1.
  void first_interior_update(const FieldLevel& u0, const FieldLevel& theta1, double t0,
                             FieldLevel& next) const;

 private:
  struct Coefficients {
    // [0] for u1, [1] for u2.
    double centre[2], east[2], west[2], north[2], south[2];
    double mixed;
    double force;  // dt^2 / rho
  };

  void update(const FieldLevel* prev, const FieldLevel& cur, const FieldLevel* theta1, double t,
              FieldLevel& next) const;

  const Grid2D& grid_;
  MaterialParams params_;
  double dt_;
  std::vector<Coefficients> coeff_;  // parallel to grid.interior_nodes()
};

/// Sets boundary values, fills ghosts and checks finiteness. Throws
/// InstabilityError naming the first non-finite node.
void apply_boundary(const Grid2D& grid, std::span<const Vec2> psi, FieldLevel& level);
void check_finite(const Grid2D& grid, const FieldLevel& level, std::size_t step);

/// u^{n+1} from u^{n-1}, u^n. psi_next holds boundary values at t_{n+1}.
void step(const ElasticSolver& solver, const FieldLevel& prev, const FieldLevel& cur,
          std::size_t n, std::span<const Vec2> psi_next, FieldLevel& next);
/// u^1 from u^0 (boundary set, ghosts filled) and the initial velocity.
void first_step(const ElasticSolver& solver, const FieldLevel& u0, const InitialData& initial,
                std::span<const Vec2> psi_1, FieldLevel& next);

struct SolveOptions {
  double t_end = 0.0;
  std::vector<double> output_times;  // within [0, t_end]
  double cfl_safety = 0.9;
  std::optional<double> max_dt;           // further caps the step
  std::size_t finite_check_interval = 256;
};

/// Time step actually used: t_end / ceil(t_end / bound).
double solver_time_step(const MaterialParams& params, const Grid2D& grid,
                        const SolveOptions& options);

/// Marches from t = 0 to t_end. Each output time is recorded at the nearest
/// step, with the step's time. Empty initial fields mean zero.
DisplacementHistory solve(const Grid2D& grid, const MaterialParams& params,
                          const InitialData& initial, const BoundarySource& boundary,
                          const SolveOptions& options);

}  // namespace dynact
