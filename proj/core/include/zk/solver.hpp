#pragma once

// Time integration of
//
//   u_t + (c_s + u) u_x + Lap u_x = f   in the box,
//   u = 0 on the boundary,  u_x(L, y, z, t) = 0,  u(., 0) = u0,
//
// with an IMEX Crank-Nicolson step: the linear dispersive part is implicit
// (see LinearPropagator), the nonlinearity -(1/2)(u^2)_x is either iterated
// to convergence at the midpoint (Picard) or extrapolated from two levels.
// By default the very first step is two backward-Euler half steps.

#include <functional>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "zk/grid.hpp"
#include "zk/linear_propagator.hpp"
#include "zk/record.hpp"
#include "zk/theory.hpp"

namespace zk {

enum class NonlinearMode { picard, extrapolated };

std::string_view to_string(NonlinearMode m) noexcept;
NonlinearMode parse_nonlinear_mode(std::string_view name);

struct PicardOptions {
  int max_iter = 50;
  double tol = 1e-10;
};

/// The built-in manufactured family
///   u_m = a exp(-lambda t) sin^2(pi x/L) sin(pi y/B_y) sin(pi z/B_z).
struct ManufacturedSolution {
  double amplitude = 0.0;
  double lambda = 0.0;
};

using ForcingFn = std::function<double(double x, double y, double z, double t)>;

/// Pointwise value of the manufactured family.
double manufactured_value(const ManufacturedSolution& m, const PhysParams& p, double x, double y, double z,
                          double t);
/// Closed-form d/dt of the manufactured family.
double manufactured_time_derivative(const ManufacturedSolution& m, const PhysParams& p, double x, double y,
                                    double z, double t);

/// f = d_t u_m + (c_s + u_m) d_x u_m + Lap d_x u_m, from closed-form derivatives.
ForcingFn mms_forcing(const ManufacturedSolution& m, const PhysParams& p);

struct SolverConfig {
  PhysParams params;
  int n_x = 49;
  int n_y = 49;
  int n_z = 49;
  double dt = 2e-3;
  double t_end = 5.0;
  NonlinearMode nonlinear_mode = NonlinearMode::picard;
  PicardOptions picard;
  /// false drops the nonlinearity (linearised problem).
  bool nonlinear = true;
  /// Replace the first step by two backward-Euler half steps. (I + dt/2 A) is
  /// the Crank-Nicolson matrix, so no extra factorization is needed; the
  /// half steps damp the stiff dispersive content that CN alone carries forever.
  bool damped_startup = true;
  std::optional<ManufacturedSolution> forcing;
  int record_every = 25;

  void validate() const;
  Grid3 grid() const;
  /// t_end / dt rounded; validate() requires t_end to be a whole number of steps.
  long step_count() const;
};

/// amplitude sin^2(pi x/L) sin(pi y/B_y) sin(pi z/B_z); zero on the boundary
/// with vanishing x-derivative at x = L.
Field3 make_initial_bump(const Grid3& grid, double amplitude);

/// u_t = -(c_s + u) u_x - Lap u_x + f with the grid operators.
Field3 compute_ut(const Field3& u, double c_s, const Field3* forcing = nullptr);

struct SimState {
  double t = 0.0;
  long step = 0;
  Field3 u;
  std::optional<Field3> u_t_cache;
  double trace_x0 = 0.0;
  double trace_accum = 0.0;
  /// Interior values one step back, used by the extrapolated nonlinearity.
  std::vector<double> previous_interior;
};

/// Owns the factorized implicit operator for one configuration.
class Solver {
 public:
  explicit Solver(SolverConfig cfg);

  const SolverConfig& config() const noexcept { return cfg_; }
  const Grid3& grid() const noexcept { return grid_; }
  const LinearPropagator& propagator() const noexcept { return prop_; }

  /// Throws CompatibilityError if u0 is not admissible initial data.
  SimState initial_state(const Field3& u0) const;

  /// One IMEX step. Throws DivergenceError or SingularSystemError.
  SimState step(const SimState& state) const;

  /// Forcing sampled at time t, or nullopt when the configuration has none.
  std::optional<Field3> forcing_at(double t) const;

  /// Fills state.u_t_cache from the equation.
  void cache_time_derivative(SimState& state) const;

 private:
  std::vector<double> forcing_interior(double t) const;
  std::vector<double> startup_step(const std::vector<double>& un, double t0) const;
  SimState finish_step(const SimState& state, std::vector<double> next, const std::vector<double>& un) const;

  SolverConfig cfg_;
  Grid3 grid_;
  LinearPropagator prop_;
  ForcingFn forcing_;
};

struct RunResult {
  SimState final_state;
  std::vector<DiagnosticsRecord> series;
};

/// Steps to t_end, recording at t = 0, every record_every steps and at t_end.
/// Step failures are rethrown nested inside a StepError carrying the time.
RunResult run(const SolverConfig& cfg, const Field3& u0);

/// Same, with a callback invoked on every recorded state.
RunResult run(const Solver& solver, const Field3& u0,
              const std::function<void(const SimState&)>& on_record = {});

}  // namespace zk
