#pragma once

// Functional time series of a run and the checks made against it: the energy
// identity, the exponential envelopes, fitted decay rates, boundedness, and
// the two-trajectory continuous-dependence experiment.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "zk/record.hpp"
#include "zk/solver.hpp"

namespace zk {

enum class Functional {
  l2_sq,
  w_l2_sq,
  trace_x0,
  trace_accum,
  ux_sq,
  uy_sq,
  uz_sq,
  h2_sq,
  ut_w_sq,
  second_yz,
  uxx_sq,
};

std::string_view to_string(Functional f) noexcept;
double value(const DiagnosticsRecord& r, Functional f) noexcept;

/// Populates every column from the state. u_t comes from state.u_t_cache when
/// present, otherwise from compute_ut without forcing.
DiagnosticsRecord record(const SimState& state, double c_s);

struct EnergyResidual {
  double max_abs = 0.0;     // max_t | ||u||^2 + trace_accum - ||u0||^2 |
  double normalized = 0.0;  // max_abs / ||u0||^2 (0 when both vanish)
};

/// Throws ValidationError on an empty series.
EnergyResidual energy_identity_residual(std::span<const DiagnosticsRecord> series);

struct Envelope {
  double initial = 0.0;
  double rate = 0.0;
};

struct EnvelopeCheck {
  bool pass = true;
  double worst_ratio = 0.0;  // max functional/envelope; +inf if the envelope vanishes under a positive value
  double worst_t = 0.0;
};

EnvelopeCheck check_envelope(std::span<const DiagnosticsRecord> series, Functional f, Envelope env,
                             double slack);

struct Window {
  double t_start = 0.0;
  double t_end = 0.0;
};

/// Default fitting window [0.2 t_last, t_last].
Window default_window(std::span<const DiagnosticsRecord> series);

struct DecayFit {
  double rate = 0.0;
  double r_squared = 1.0;
  Window window;
  int points = 0;
};

/// Least-squares slope of log(functional) against t over the records inside the
/// window; rate is the negated slope. Throws ValidationError for fewer than two
/// points or nonpositive values (message lists the offending times).
DecayFit fit_decay_rate(std::span<const DiagnosticsRecord> series, Functional f, Window window);

struct BoundednessCheck {
  bool pass = true;
  double max_value = 0.0;    // max of the functional (mode A) or of lhs - rhs (mode B)
  double worst_ratio = 0.0;  // max functional/bound (mode A) or lhs/rhs (mode B)
  double worst_t = 0.0;
};

/// Functional never exceeds bound.
BoundednessCheck check_boundedness(std::span<const DiagnosticsRecord> series, Functional f, double bound);

/// ||u_x||^2(t) <= C1 ||u||^2(t) + (2/5)(1+L) ((1+x),u_t^2)(t) at every record.
BoundednessCheck check_ux_bound(std::span<const DiagnosticsRecord> series, double c1, double L);

struct ContinuousDependence {
  double ratio = 0.0;  // sup_t ((1+x),w^2)(t) / ((1+x),w0^2)
  double worst_t = 0.0;
  int records = 0;
};

/// Runs both trajectories with the same configuration and compares them every
/// record_every steps. Identical data give exactly 0.
ContinuousDependence continuous_dependence(const SolverConfig& cfg, const Field3& u0_a, const Field3& u0_b);
ContinuousDependence continuous_dependence(const Solver& solver, const Field3& u0_a, const Field3& u0_b);

}  // namespace zk
