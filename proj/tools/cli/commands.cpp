#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "report.hpp"
#include "zk/convergence.hpp"
#include "zk/diagnostics.hpp"
#include "zk/errors.hpp"
#include "zk/ineq.hpp"

namespace zk::cli {

namespace {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void print_condition(std::ostream& out, const char* name, const Condition& c) {
  out << "  " << name << ": " << (c.pass ? "pass" : "FAIL") << "  margin " << format_real(c.margin) << '\n';
}

void require_scenario(const RunConfig& cfg, Scenario want, const char* command) {
  if (cfg.scenario != want) {
    throw ConfigError(std::string(command) + " needs scenario = " + std::string(to_string(want)) + ", config has " +
                          std::string(to_string(cfg.scenario)),
                      0, "scenario");
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  return f;
}

void finish_output(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed");
}

std::string summary_text(const Summary& s) { return s.doc.dump(2) + "\n"; }

}  // namespace

int report_exception(std::ostream& err) {
  try {
    throw;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kInputError;
  } catch (const CompatibilityError& e) {
    err << "incompatible initial data: " << e.what() << " (residual " << format_real(e.residual()) << ", tolerance "
        << format_real(e.tolerance()) << ")\n";
    return kInputError;
  } catch (const StepError& e) {
    err << "solver failure at t = " << format_real(e.time()) << ": " << e.what() << '\n';
    try {
      std::rethrow_if_nested(e);
    } catch (const std::exception& inner) {
      err << "  cause: " << inner.what() << '\n';
    } catch (...) {
    }
    return kCheckFailed;
  } catch (const DivergenceError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kCheckFailed;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInputError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (...) {
    err << "unknown error\n";
    return kInputError;
  }
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
  const Prelude pre = make_prelude(cfg);
  const TheoryConstants& k = pre.constants;
  out << "constants\n";
  out << "  K1  " << format_real(k.K1) << '\n';
  out << "  K2  " << format_real(k.K2) << '\n';
  out << "  K3  " << format_real(k.K3) << '\n';
  out << "  K4  " << format_real(k.K4) << '\n';
  out << "  C1 (theorem_statement)  " << format_real(c1_value(cfg.params.c_s, pre.u0_l2, C1Convention::theorem_statement))
      << '\n';
  out << "  C1 (estimate_iii)       " << format_real(c1_value(cfg.params.c_s, pre.u0_l2, C1Convention::estimate_iii))
      << '\n';
  out << "  chi " << format_real(k.chi) << '\n';
  if (cfg.amplitude) {
    out << "  |u0| " << format_real(pre.u0_l2) << '\n';
    out << "  J0  " << format_real(pre.J0) << '\n';
  }
  out << "certificate\n";
  print_condition(out, "cond_K2", pre.certificate.cond_K2);
  print_condition(out, "cond_u0", pre.certificate.cond_u0);
  print_condition(out, "cond_J0", pre.certificate.cond_J0);
  out << "  overall: " << (pre.certificate.overall ? "pass" : "FAIL") << '\n';
  return pre.certificate.overall ? kOk : kCertificateFailed;
}

int cmd_run(const RunConfig& cfg, const std::string& csv_path, const std::string& summary_path,
            std::ostream& out) {
  require_scenario(cfg, Scenario::decay, "run");
  const SolverConfig scfg = cfg.solver_config();
  const Prelude pre = make_prelude(cfg);

  std::ofstream csv;
  std::ofstream summary;
  if (!csv_path.empty()) csv = open_output(csv_path);
  if (!summary_path.empty()) summary = open_output(summary_path);

  const Solver solver(scfg);
  const RunResult result = run(solver, make_initial_bump(solver.grid(), *cfg.amplitude));

  if (!csv_path.empty()) {
    write_csv(csv, result.series);
    finish_output(csv, csv_path);
  }
  const Summary s = make_summary(cfg, pre, result.series);
  if (!summary_path.empty()) {
    summary << summary_text(s);
    finish_output(summary, summary_path);
  }

  out << "records " << result.series.size() << ", t_end " << format_real(result.final_state.t) << '\n';
  out << "certificate " << (pre.certificate.overall ? "pass" : "fail") << '\n';
  for (const auto& [name, check] : s.doc["checks"].items()) {
    out << "  " << name << ": " << check["status"].get<std::string>() << '\n';
  }
  return s.all_pass ? kOk : kCheckFailed;
}

int cmd_verify(const RunConfig& cfg, const std::string& csv_path, const std::string& summary_path,
               std::ostream& out) {
  require_scenario(cfg, Scenario::decay, "verify");
  std::ifstream csv(csv_path, std::ios::binary);
  if (!csv) throw IoError("cannot open '" + csv_path + "'");
  std::ifstream summary(summary_path, std::ios::binary);
  if (!summary) throw IoError("cannot open '" + summary_path + "'");
  const std::vector<DiagnosticsRecord> series = read_csv(csv);
  std::ostringstream stored;
  stored << summary.rdbuf();
  const std::string rebuilt = summary_text(make_summary(cfg, make_prelude(cfg), series));
  const bool same = rebuilt == stored.str();
  out << "summary " << (same ? "reproduced" : "differs") << " from " << series.size() << " CSV rows\n";
  return same ? kOk : kCheckFailed;
}

int cmd_mms(const RunConfig& cfg, std::ostream& out) {
  SolverConfig base = cfg.solver_config();
  base.forcing = ManufacturedSolution{cfg.amplitude.value_or(0.0), cfg.mms_lambda};
  const MmsStudy study = run_mms_ladder(base, cfg.ladder, cfg.dt);

  out << "     n            h           dt   steps       l2_error    order\n";
  for (std::size_t i = 0; i < study.levels.size(); ++i) {
    const MmsLevel& l = study.levels[i];
    char line[160];
    if (i == 0 || study.exact) {
      std::snprintf(line, sizeof line, "%6d %12.6g %12.6g %7ld %14.6e %8s\n", l.n, l.h, l.dt, l.steps, l.l2_error,
                    "-");
    } else {
      std::snprintf(line, sizeof line, "%6d %12.6g %12.6g %7ld %14.6e %8.4f\n", l.n, l.h, l.dt, l.steps,
                    l.l2_error, l.order);
    }
    out << line;
  }
  if (study.exact) {
    out << "errors are exactly zero at every level: exact\n";
    return kOk;
  }
  const bool ok = study.monotone && study.finest_order >= 1.8;
  out << "finest-pair order " << format_real(study.finest_order) << ", errors "
      << (study.monotone ? "monotone" : "NOT monotone") << ": " << (ok ? "pass" : "FAIL") << '\n';
  return ok ? kOk : kCheckFailed;
}

int cmd_ineq(const RunConfig& cfg, std::ostream& out) {
  const Grid3 g = cfg.grid();
  bool ok = true;
  const auto line = [&](const std::string& name, const IneqReport& r) {
    out << "  " << name << ": worst_ratio " << format_real(r.worst_ratio) << " (sample " << r.worst_sample_id
        << "), tolerance " << format_real(r.tolerance) << ": " << (r.pass ? "pass" : "FAIL") << '\n';
    ok = ok && r.pass;
  };

  out << "steklov (" << cfg.samples << " samples per axis, seed " << cfg.seed << ")\n";
  const Field3 eigen = sine_field(g, {SineMode{1, 1, 1, 1.0}});
  for (Axis a : kAxes) {
    const std::string axis(1, "xyz"[static_cast<int>(a)]);
    line("axis " + axis, steklov_suite(g, a, cfg.samples, cfg.seed, cfg.steklov_slack));
    const double bound = steklov_bound(g, a);
    const double rel = std::abs(steklov_ratio(eigen, a) - bound) / bound;
    const double h = g.spacing(a);
    const double tol = cfg.steklov_slack * h * h;
    const bool pass = rel <= tol;
    out << "  eigenfunction " << axis << ": relative gap " << format_real(rel) << ", tolerance " << format_real(tol)
        << ": " << (pass ? "pass" : "FAIL") << '\n';
    ok = ok && pass;
  }

  out << "interpolation (" << cfg.samples << " samples, seed " << cfg.seed << ")\n";
  for (double q : {3.0, 4.0}) {
    line("q = " + format_real(q), interpolation_suite(g, q, cfg.samples, cfg.seed, cfg.interp_tol));
  }
  RandomSineFields fields(cfg.seed);
  double worst = 0.0;
  for (int i = 0; i < std::min(cfg.samples, 10); ++i) {
    worst = std::max(worst, std::abs(interpolation_ratio(fields.next(g), 2.0) - 1.0));
  }
  const bool q2 = worst <= 1e-12;
  out << "  q = 2 identity: max |ratio - 1| " << format_real(worst) << ": " << (q2 ? "pass" : "FAIL") << '\n';
  ok = ok && q2;
  return ok ? kOk : kCheckFailed;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out) {
  require_scenario(cfg, Scenario::compare, "compare");
  for (double d : cfg.deltas) {
    if (!(d > 0.0)) throw ConfigError("every delta must be positive", 0, "deltas");
  }
  const Solver solver(cfg.solver_config());
  const Grid3& g = solver.grid();
  const double amp = *cfg.amplitude;
  const Field3 u0_a = make_initial_bump(g, amp);

  const auto perturbed = [&](double delta) {
    if (cfg.perturbation == Perturbation::scale) return make_initial_bump(g, amp * (1.0 + delta));
    const double kx = std::numbers::pi / g.L;
    const double ky = std::numbers::pi / g.B_y;
    const double kz = std::numbers::pi / g.B_z;
    const Field3 bump = Field3::sample(
        g, [&](double x, double y, double z) { return std::sin(kx * x) * std::sin(ky * y) * std::sin(kz * z); },
        BcTag::dirichlet_all);
    return u0_a + delta * bump;
  };

  // Rejects incompatible perturbed data before any stepping.
  for (double d : cfg.deltas) (void)solver.initial_state(perturbed(d));

  const ContinuousDependence same = continuous_dependence(solver, u0_a, u0_a);
  out << "identical data: ratio " << format_real(same.ratio) << '\n';
  bool ok = same.ratio == 0.0;

  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double d : cfg.deltas) {
    const ContinuousDependence cd = continuous_dependence(solver, u0_a, perturbed(d));
    out << "delta " << format_real(d) << ": ratio " << format_real(cd.ratio) << " at t = " << format_real(cd.worst_t)
        << '\n';
    lo = std::min(lo, cd.ratio);
    hi = std::max(hi, cd.ratio);
  }
  const double spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  const bool stable = spread <= cfg.compare_factor;
  out << "spread max/min " << format_real(spread) << ", allowed " << format_real(cfg.compare_factor) << ": "
      << (stable ? "pass" : "FAIL") << '\n';
  ok = ok && stable;
  return ok ? kOk : kCheckFailed;
}

}  // namespace zk::cli
