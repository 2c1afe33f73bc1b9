#include "zk/solver.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>
#include <string>

#include "zk/diagnostics.hpp"
#include "zk/errors.hpp"

namespace zk {

std::string_view to_string(NonlinearMode m) noexcept {
  return m == NonlinearMode::picard ? "picard" : "extrapolated";
}

NonlinearMode parse_nonlinear_mode(std::string_view name) {
  if (name == "picard") return NonlinearMode::picard;
  if (name == "extrapolated") return NonlinearMode::extrapolated;
  throw ValidationError("unknown nonlinear_mode '" + std::string(name) + "' (expected picard or extrapolated)");
}

// ---------------------------------------------------------------------------
// Manufactured family

namespace {

struct ShapeTerms {
  double s, s1, s3;  // sin^2(kx x) and its first and third x-derivatives
  double yz;         // sin(ky y) sin(kz z)
  double k_perp_sq;  // ky^2 + kz^2
};

ShapeTerms shape_terms(const PhysParams& p, double x, double y, double z) {
  const double kx = std::numbers::pi / p.L;
  const double ky = std::numbers::pi / p.B_y;
  const double kz = std::numbers::pi / p.B_z;
  const double sx = std::sin(kx * x);
  const double s2x = std::sin(2.0 * kx * x);
  return {sx * sx, kx * s2x, -4.0 * kx * kx * kx * s2x, std::sin(ky * y) * std::sin(kz * z), ky * ky + kz * kz};
}

}  // namespace

double manufactured_value(const ManufacturedSolution& m, const PhysParams& p, double x, double y, double z,
                          double t) {
  const ShapeTerms s = shape_terms(p, x, y, z);
  return m.amplitude * std::exp(-m.lambda * t) * s.s * s.yz;
}

double manufactured_time_derivative(const ManufacturedSolution& m, const PhysParams& p, double x, double y,
                                    double z, double t) {
  return -m.lambda * manufactured_value(m, p, x, y, z, t);
}

ForcingFn mms_forcing(const ManufacturedSolution& m, const PhysParams& p) {
  return [m, p](double x, double y, double z, double t) {
    const ShapeTerms s = shape_terms(p, x, y, z);
    const double amp = m.amplitude * std::exp(-m.lambda * t);
    const double u = amp * s.s * s.yz;
    const double ux = amp * s.s1 * s.yz;
    const double lap_ux = amp * (s.s3 - s.k_perp_sq * s.s1) * s.yz;
    return -m.lambda * u + (p.c_s + u) * ux + lap_ux;
  };
}

// ---------------------------------------------------------------------------
// Configuration

void SolverConfig::validate() const {
  params.validate();
  (void)make_grid(params.L, params.B_y, params.B_z, n_x, n_y, n_z);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive and finite");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ValidationError("t_end must be finite and >= 0");
  if (picard.max_iter < 1) throw ValidationError("picard max_iter must be >= 1");
  if (!(picard.tol > 0.0)) throw ValidationError("picard tol must be > 0");
  if (record_every < 1) throw ValidationError("record_every must be >= 1");
  const double steps = t_end / dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
    std::ostringstream msg;
    msg << "t_end=" << t_end << " is not a whole number of steps of dt=" << dt;
    throw ValidationError(msg.str());
  }
  if (forcing && (!std::isfinite(forcing->amplitude) || !std::isfinite(forcing->lambda))) {
    throw ValidationError("manufactured solution parameters must be finite");
  }
}

Grid3 SolverConfig::grid() const { return make_grid(params.L, params.B_y, params.B_z, n_x, n_y, n_z); }

long SolverConfig::step_count() const { return std::lround(t_end / dt); }

// ---------------------------------------------------------------------------

Field3 make_initial_bump(const Grid3& grid, double amplitude) {
  if (!std::isfinite(amplitude)) throw ValidationError("bump amplitude must be finite");
  const double kx = std::numbers::pi / grid.L;
  const double ky = std::numbers::pi / grid.B_y;
  const double kz = std::numbers::pi / grid.B_z;
  return Field3::sample(
      grid,
      [&](double x, double y, double z) {
        const double s = std::sin(kx * x);
        return amplitude * s * s * std::sin(ky * y) * std::sin(kz * z);
      },
      BcTag::dirichlet_all);
}

Field3 compute_ut(const Field3& u, double c_s, const Field3* forcing) {
  const Field3 ux = deriv(u, Axis::x);
  const Field3 lap_ux = laplacian(ux);
  std::vector<double> out(u.size());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = -(c_s + u[n]) * ux[n] - lap_ux[n];
  if (forcing != nullptr) {
    if (!(forcing->grid() == u.grid())) throw ValidationError("forcing lives on a different grid");
    for (std::size_t n = 0; n < out.size(); ++n) out[n] += (*forcing)[n];
  }
  return Field3(u.grid(), std::move(out), BcTag::free);
}

// ---------------------------------------------------------------------------
// Solver

namespace {

SolverConfig validated(SolverConfig cfg) {
  cfg.validate();
  return cfg;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

Solver::Solver(SolverConfig cfg)
    : cfg_(validated(std::move(cfg))), grid_(cfg_.grid()), prop_(grid_, cfg_.params.c_s, cfg_.dt) {
  if (cfg_.forcing) forcing_ = mms_forcing(*cfg_.forcing, cfg_.params);
}

std::optional<Field3> Solver::forcing_at(double t) const {
  if (!forcing_) return std::nullopt;
  return Field3::sample(grid_, [&](double x, double y, double z) { return forcing_(x, y, z, t); }, BcTag::free);
}

std::vector<double> Solver::forcing_interior(double t) const {
  const InteriorLayout& lay = prop_.layout();
  std::vector<double> out(lay.size());
  for (int a = 0; a < lay.m_x; ++a)
    for (int c = 0; c < lay.m_z; ++c)
      for (int b = 0; b < lay.m_y; ++b)
        out[lay.index(a, b, c)] = forcing_(grid_.x(a + 1), grid_.y(b + 1), grid_.z(c + 1), t);
  return out;
}

SimState Solver::initial_state(const Field3& u0) const {
  if (!(u0.grid() == grid_)) throw ValidationError("initial data lives on a different grid");
  const CompatibilityReport compat = check_compatibility(u0);
  if (!compat.ok) {
    std::ostringstream msg;
    msg << "initial data violates u_x(L)=0: residual " << compat.residual << " exceeds tolerance "
        << compat.tolerance;
    throw CompatibilityError(msg.str(), compat.residual, compat.tolerance);
  }
  SimState s{.t = 0.0, .step = 0, .u = u0, .u_t_cache = std::nullopt, .trace_x0 = trace_x0_sq(u0),
             .trace_accum = 0.0, .previous_interior = {}};
  return s;
}

void Solver::cache_time_derivative(SimState& state) const {
  const std::optional<Field3> f = forcing_at(state.t);
  state.u_t_cache = compute_ut(state.u, cfg_.params.c_s, f ? &*f : nullptr);
}

std::vector<double> Solver::startup_step(const std::vector<double>& un, double t0) const {
  // Two backward-Euler half steps with the nonlinearity at the old level:
  // (I + dt/2 A) v = v_old + dt/2 (N(v_old) + f(t_old + dt/2)).
  const double half = 0.5 * cfg_.dt;
  const std::size_t size = un.size();
  std::vector<double> v = un;
  std::vector<double> rhs(size);
  std::vector<double> work(size);
  for (int k = 1; k <= 2; ++k) {
    for (std::size_t n = 0; n < size; ++n) rhs[n] = v[n];
    if (cfg_.nonlinear) {
      prop_.nonlinear_term(v, work);
      for (std::size_t n = 0; n < size; ++n) rhs[n] += half * work[n];
    }
    if (forcing_) {
      const std::vector<double> f = forcing_interior(t0 + k * half);
      for (std::size_t n = 0; n < size; ++n) rhs[n] += half * f[n];
    }
    prop_.solve(rhs, v);
  }
  return v;
}

SimState Solver::step(const SimState& state) const {
  const double dt = cfg_.dt;
  const std::size_t size = prop_.layout().size();
  const std::vector<double> un = gather_interior(state.u);
  const double t_next = static_cast<double>(state.step + 1) * dt;
  if (state.step == 0 && cfg_.damped_startup) return finish_step(state, startup_step(un, state.t), un);

  // rhs0 = u^n - dt/2 A u^n + dt (f^n + f^{n+1})/2
  std::vector<double> rhs0(size);
  prop_.apply(un, rhs0);
  for (std::size_t n = 0; n < size; ++n) rhs0[n] = un[n] - 0.5 * dt * rhs0[n];
  if (forcing_) {
    const std::vector<double> f0 = forcing_interior(state.t);
    const std::vector<double> f1 = forcing_interior(t_next);
    for (std::size_t n = 0; n < size; ++n) rhs0[n] += 0.5 * dt * (f0[n] + f1[n]);
  }

  std::vector<double> next(size);
  std::vector<double> rhs(size);
  std::vector<double> work(size);

  if (!cfg_.nonlinear) {
    prop_.solve(rhs0, next);
  } else if (cfg_.nonlinear_mode == NonlinearMode::extrapolated && !state.previous_interior.empty()) {
    std::vector<double> older(size);
    prop_.nonlinear_term(un, work);
    prop_.nonlinear_term(state.previous_interior, older);
    for (std::size_t n = 0; n < size; ++n) rhs[n] = rhs0[n] + dt * (1.5 * work[n] - 0.5 * older[n]);
    prop_.solve(rhs, next);
  } else {
    // Picard on the midpoint value; also the start-up step of the extrapolated mode.
    std::vector<double> iterate = un;
    std::vector<double> mid(size);
    std::vector<double> history;
    bool converged = false;
    for (int it = 0; it < cfg_.picard.max_iter; ++it) {
      for (std::size_t n = 0; n < size; ++n) mid[n] = 0.5 * (un[n] + iterate[n]);
      prop_.nonlinear_term(mid, work);
      for (std::size_t n = 0; n < size; ++n) rhs[n] = rhs0[n] + dt * work[n];
      prop_.solve(rhs, next);
      double diff = 0.0;
      for (std::size_t n = 0; n < size; ++n) diff = std::max(diff, std::abs(next[n] - iterate[n]));
      const double scale = max_abs(next);
      const double residual = scale > 0.0 ? diff / scale : diff;
      history.push_back(residual);
      iterate.swap(next);
      if (residual <= cfg_.picard.tol) {
        converged = true;
        break;
      }
    }
    next.swap(iterate);
    if (!converged) {
      std::ostringstream msg;
      msg << "Picard iteration did not converge in " << cfg_.picard.max_iter << " iterations (last residual "
          << history.back() << ")";
      throw DivergenceError(msg.str(), std::move(history));
    }
  }

  return finish_step(state, std::move(next), un);
}

SimState Solver::finish_step(const SimState& state, std::vector<double> next, const std::vector<double>& un) const {
  for (double v : next) {
    if (!std::isfinite(v)) throw SingularSystemError("implicit solve produced a non-finite value");
  }
  const double dt = cfg_.dt;
  SimState out{.t = static_cast<double>(state.step + 1) * dt,
               .step = state.step + 1,
               .u = scatter_interior(grid_, next),
               .u_t_cache = std::nullopt,
               .trace_x0 = 0.0,
               .trace_accum = 0.0,
               .previous_interior = un};
  out.trace_x0 = trace_x0_sq(out.u);
  out.trace_accum = state.trace_accum + 0.5 * dt * (state.trace_x0 + out.trace_x0);
  return out;
}

RunResult run(const SolverConfig& cfg, const Field3& u0) {
  const Solver solver(cfg);
  return run(solver, u0);
}

RunResult run(const Solver& solver, const Field3& u0, const std::function<void(const SimState&)>& on_record) {
  const SolverConfig& cfg = solver.config();
  const long steps = cfg.step_count();
  RunResult result{.final_state = solver.initial_state(u0), .series = {}};
  SimState& state = result.final_state;

  const auto emit = [&]() {
    solver.cache_time_derivative(state);
    result.series.push_back(record(state, cfg.params.c_s));
    if (on_record) on_record(state);
  };

  emit();
  for (long s = 0; s < steps; ++s) {
    try {
      state = solver.step(state);
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "step failed at t=" << state.t << ": " << e.what();
      std::throw_with_nested(StepError(msg.str(), state.t));
    }
    if (state.step % cfg.record_every == 0 || state.step == steps) emit();
  }
  return result;
}

}  // namespace zk
