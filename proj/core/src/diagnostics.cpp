#include "zk/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "zk/errors.hpp"

namespace zk {

std::string_view to_string(Functional f) noexcept {
  switch (f) {
    case Functional::l2_sq: return "l2_sq";
    case Functional::w_l2_sq: return "w_l2_sq";
    case Functional::trace_x0: return "trace_x0";
    case Functional::trace_accum: return "trace_accum";
    case Functional::ux_sq: return "ux_sq";
    case Functional::uy_sq: return "uy_sq";
    case Functional::uz_sq: return "uz_sq";
    case Functional::h2_sq: return "h2_sq";
    case Functional::ut_w_sq: return "ut_w_sq";
    case Functional::second_yz: return "second_yz";
    case Functional::uxx_sq: return "uxx_sq";
  }
  return "";
}

double value(const DiagnosticsRecord& r, Functional f) noexcept {
  switch (f) {
    case Functional::l2_sq: return r.l2_sq;
    case Functional::w_l2_sq: return r.w_l2_sq;
    case Functional::trace_x0: return r.trace_x0;
    case Functional::trace_accum: return r.trace_accum;
    case Functional::ux_sq: return r.ux_sq;
    case Functional::uy_sq: return r.uy_sq;
    case Functional::uz_sq: return r.uz_sq;
    case Functional::h2_sq: return r.h2_sq;
    case Functional::ut_w_sq: return r.ut_w_sq;
    case Functional::second_yz: return r.second_yz;
    case Functional::uxx_sq: return r.uxx_sq;
  }
  return 0.0;
}

DiagnosticsRecord record(const SimState& state, double c_s) {
  const Field3& u = state.u;
  DiagnosticsRecord r;
  r.t = state.t;
  r.l2_sq = l2_sq(u);
  r.w_l2_sq = weighted_l2_sq(u);
  r.trace_x0 = trace_x0_sq(u);
  r.trace_accum = state.trace_accum;

  const Field3 ux = deriv(u, Axis::x);
  const Field3 uy = deriv(u, Axis::y);
  const Field3 uz = deriv(u, Axis::z);
  r.ux_sq = l2_sq(ux);
  r.uy_sq = l2_sq(uy);
  r.uz_sq = l2_sq(uz);

  const Field3 uxx = second_deriv(u, Axis::x, Axis::x);
  const Field3 uyy = second_deriv(u, Axis::y, Axis::y);
  const Field3 uzz = second_deriv(u, Axis::z, Axis::z);
  const Field3 uxy = deriv(ux, Axis::y);
  const Field3 uxz = deriv(ux, Axis::z);
  const Field3 uyz = deriv(uy, Axis::z);
  r.uxx_sq = l2_sq(uxx);
  // Same summation order as norm(u, NormKind::H2).
  r.h2_sq = r.l2_sq + (r.ux_sq + r.uy_sq + r.uz_sq) + l2_sq(uxx) + l2_sq(uxy) + l2_sq(uxz) + l2_sq(uyy) +
            l2_sq(uyz) + l2_sq(uzz);
  r.second_yz = weighted_l2_sq(uyy) + weighted_l2_sq(uzz) + weighted_l2_sq(uyz);

  if (state.u_t_cache) {
    r.ut_w_sq = weighted_l2_sq(*state.u_t_cache);
  } else {
    r.ut_w_sq = weighted_l2_sq(compute_ut(u, c_s));
  }

  r.traces_2nd = {trace_face_sq(u, Face::x0, {.y = 1, .z = 0}), trace_face_sq(u, Face::x0, {.y = 0, .z = 1})};
  r.traces_3rd = {trace_face_sq(u, Face::x0, {.y = 2, .z = 0}), trace_face_sq(u, Face::x0, {.y = 0, .z = 2}),
                  trace_face_sq(u, Face::x0, {.y = 1, .z = 1})};
  return r;
}

EnergyResidual energy_identity_residual(std::span<const DiagnosticsRecord> series) {
  if (series.empty()) throw ValidationError("energy identity needs a nonempty series");
  const double e0 = series.front().l2_sq;
  EnergyResidual out;
  for (const DiagnosticsRecord& r : series) {
    out.max_abs = std::max(out.max_abs, std::abs(r.l2_sq + r.trace_accum - e0));
  }
  if (e0 > 0.0) {
    out.normalized = out.max_abs / e0;
  } else {
    out.normalized = out.max_abs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return out;
}

EnvelopeCheck check_envelope(std::span<const DiagnosticsRecord> series, Functional f, Envelope env,
                             double slack) {
  if (!(slack >= 0.0)) throw ValidationError("envelope slack must be >= 0");
  EnvelopeCheck out;
  for (const DiagnosticsRecord& r : series) {
    const double v = value(r, f);
    const double bound = decay_envelope(env.initial, env.rate, r.t);
    double ratio = 0.0;
    if (bound > 0.0) {
      ratio = v / bound;
    } else if (v > 0.0) {
      ratio = std::numeric_limits<double>::infinity();
    }
    if (ratio > out.worst_ratio) {
      out.worst_ratio = ratio;
      out.worst_t = r.t;
    }
  }
  out.pass = out.worst_ratio <= 1.0 + slack;
  return out;
}

Window default_window(std::span<const DiagnosticsRecord> series) {
  const double t_last = series.empty() ? 0.0 : series.back().t;
  return {0.2 * t_last, t_last};
}

DecayFit fit_decay_rate(std::span<const DiagnosticsRecord> series, Functional f, Window window) {
  std::vector<double> ts;
  std::vector<double> ys;
  std::vector<double> bad;
  for (const DiagnosticsRecord& r : series) {
    if (r.t < window.t_start || r.t > window.t_end) continue;
    const double v = value(r, f);
    if (!(v > 0.0)) {
      bad.push_back(r.t);
      continue;
    }
    ts.push_back(r.t);
    ys.push_back(std::log(v));
  }
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << to_string(f) << " is nonpositive at t =";
    for (double t : bad) msg << ' ' << t;
    throw ValidationError(msg.str());
  }
  if (ts.size() < 2) {
    throw ValidationError("decay fit needs at least two records inside the window");
  }

  const double n = static_cast<double>(ts.size());
  double t_mean = 0.0;
  double y_mean = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    t_mean += ts[i];
    y_mean += ys[i];
  }
  t_mean /= n;
  y_mean /= n;
  double stt = 0.0;
  double sty = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double dt = ts[i] - t_mean;
    const double dy = ys[i] - y_mean;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  if (!(stt > 0.0)) throw ValidationError("decay fit window contains a single distinct time");

  const double slope = sty / stt;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double e = ys[i] - (y_mean + slope * (ts[i] - t_mean));
    ss_res += e * e;
  }

  DecayFit fit;
  fit.rate = -slope;
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.window = window;
  fit.points = static_cast<int>(ts.size());
  return fit;
}

BoundednessCheck check_boundedness(std::span<const DiagnosticsRecord> series, Functional f, double bound) {
  BoundednessCheck out;
  out.worst_ratio = 0.0;
  for (const DiagnosticsRecord& r : series) {
    const double v = value(r, f);
    if (v >= out.max_value) {
      out.max_value = v;
      out.worst_t = r.t;
    }
    if (v > bound) out.pass = false;
  }
  if (bound > 0.0) {
    out.worst_ratio = out.max_value / bound;
  } else {
    out.worst_ratio = out.max_value > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return out;
}

BoundednessCheck check_ux_bound(std::span<const DiagnosticsRecord> series, double c1, double L) {
  BoundednessCheck out;
  out.max_value = -std::numeric_limits<double>::infinity();
  for (const DiagnosticsRecord& r : series) {
    const double rhs = c1 * r.l2_sq + 0.4 * (1.0 + L) * r.ut_w_sq;
    const double lhs = r.ux_sq;
    if (lhs > rhs) out.pass = false;
    if (lhs - rhs > out.max_value) out.max_value = lhs - rhs;
    double ratio = 0.0;
    if (rhs > 0.0) {
      ratio = lhs / rhs;
    } else if (lhs > 0.0) {
      ratio = std::numeric_limits<double>::infinity();
    }
    if (ratio > out.worst_ratio) {
      out.worst_ratio = ratio;
      out.worst_t = r.t;
    }
  }
  if (series.empty()) out.max_value = 0.0;
  return out;
}

ContinuousDependence continuous_dependence(const SolverConfig& cfg, const Field3& u0_a, const Field3& u0_b) {
  const Solver solver(cfg);
  return continuous_dependence(solver, u0_a, u0_b);
}

ContinuousDependence continuous_dependence(const Solver& solver, const Field3& u0_a, const Field3& u0_b) {
  const SolverConfig& cfg = solver.config();
  SimState a = solver.initial_state(u0_a);
  SimState b = solver.initial_state(u0_b);
  const double w0 = weighted_l2_sq(a.u - b.u);

  ContinuousDependence out;
  const auto observe = [&]() {
    const double w = weighted_l2_sq(a.u - b.u);
    ++out.records;
    double ratio = 0.0;
    if (w0 > 0.0) {
      ratio = w / w0;
    } else if (w > 0.0) {
      ratio = std::numeric_limits<double>::infinity();
    }
    if (ratio > out.ratio) {
      out.ratio = ratio;
      out.worst_t = a.t;
    }
  };

  observe();
  const long steps = cfg.step_count();
  for (long s = 0; s < steps; ++s) {
    a = solver.step(a);
    b = solver.step(b);
    if (a.step % cfg.record_every == 0 || a.step == steps) observe();
  }
  return out;
}

}  // namespace zk
