#include "report.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "zk/errors.hpp"

namespace zk::cli {

using nlohmann::ordered_json;

std::string format_real(double v) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_csv_row(std::ostream& out, const DiagnosticsRecord& r) {
  const std::array<double, 12> cols{r.t,       r.l2_sq, r.w_l2_sq, r.trace_x0, r.trace_accum, r.ux_sq,
                                    r.uy_sq,   r.uz_sq, r.h2_sq,   r.ut_w_sq,  r.second_yz,   r.uxx_sq};
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i > 0) out << ',';
    out << format_real(cols[i]);
  }
  out << '\n';
}

void write_csv(std::ostream& out, std::span<const DiagnosticsRecord> series) {
  write_csv_header(out);
  for (const DiagnosticsRecord& r : series) write_csv_row(out, r);
}

std::vector<DiagnosticsRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ValidationError("CSV header mismatch");
  std::vector<DiagnosticsRecord> out;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::array<double, 12> v{};
    std::stringstream ss(line);
    std::string cell;
    std::size_t k = 0;
    while (std::getline(ss, cell, ',')) {
      if (k >= v.size()) throw ValidationError("CSV row " + std::to_string(row) + ": too many columns");
      char* end = nullptr;
      v[k] = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        throw ValidationError("CSV row " + std::to_string(row) + ": bad number '" + cell + "'");
      }
      ++k;
    }
    if (k != v.size()) throw ValidationError("CSV row " + std::to_string(row) + ": expected 12 columns");
    DiagnosticsRecord r;
    r.t = v[0];
    r.l2_sq = v[1];
    r.w_l2_sq = v[2];
    r.trace_x0 = v[3];
    r.trace_accum = v[4];
    r.ux_sq = v[5];
    r.uy_sq = v[6];
    r.uz_sq = v[7];
    r.h2_sq = v[8];
    r.ut_w_sq = v[9];
    r.second_yz = v[10];
    r.uxx_sq = v[11];
    out.push_back(r);
  }
  return out;
}

Prelude make_prelude(const RunConfig& cfg) {
  cfg.params.validate();
  Prelude p;
  const double amp = cfg.amplitude.value_or(0.0);
  if (cfg.amplitude) {
    const Field3 u0 = make_initial_bump(cfg.grid(), amp);
    p.u0_l2 = norm(u0, NormKind::L2);
    p.J0 = compute_J0(u0, cfg.params);
  }
  p.constants = compute_constants(cfg.params, p.u0_l2, cfg.c1_convention);
  p.constants_iii = compute_constants(cfg.params, p.u0_l2, C1Convention::estimate_iii);
  p.certificate = check_hypotheses(p.constants, cfg.params.c_s, p.u0_l2, p.J0);
  return p;
}

namespace {

ordered_json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

ordered_json condition(const Condition& c) { return {{"pass", c.pass}, {"margin", num(c.margin)}}; }

const char* status(bool pass) { return pass ? "pass" : "fail"; }

ordered_json skipped(const std::string& reason) { return {{"status", "skipped"}, {"reason", reason}}; }

bool all_zero(std::span<const DiagnosticsRecord> series, Functional f) {
  for (const DiagnosticsRecord& r : series) {
    if (value(r, f) != 0.0) return false;
  }
  return true;
}

}  // namespace

Summary make_summary(const RunConfig& cfg, const Prelude& pre, std::span<const DiagnosticsRecord> series) {
  Summary s;
  ordered_json& doc = s.doc;
  const TheoryConstants& k = pre.constants;

  doc["constants"] = {{"K1", num(k.K1)},
                      {"K2", num(k.K2)},
                      {"K3", num(k.K3)},
                      {"K4", num(k.K4)},
                      {"C1_theorem_statement", num(c1_value(cfg.params.c_s, pre.u0_l2, C1Convention::theorem_statement))},
                      {"C1_estimate_iii", num(c1_value(cfg.params.c_s, pre.u0_l2, C1Convention::estimate_iii))},
                      {"c1_convention", std::string(to_string(k.c1_convention))},
                      {"chi", num(k.chi)},
                      {"u0_l2", num(pre.u0_l2)},
                      {"J0", num(pre.J0)}};
  doc["certificate"] = {{"cond_K2", condition(pre.certificate.cond_K2)},
                        {"cond_u0", condition(pre.certificate.cond_u0)},
                        {"cond_J0", condition(pre.certificate.cond_J0)},
                        {"overall", pre.certificate.overall}};

  ordered_json checks = ordered_json::object();
  ordered_json fits = ordered_json::object();
  if (series.empty()) {
    doc["checks"] = checks;
    doc["fits"] = fits;
    return s;
  }
  const bool certified = pre.certificate.overall;
  const std::string not_certified = "hypothesis certificate fails";

  const EnergyResidual er = energy_identity_residual(series);
  const bool energy_ok = er.normalized <= cfg.energy_tol;
  checks["energy_identity"] = {{"status", status(energy_ok)},
                               {"normalized_residual", num(er.normalized)},
                               {"max_abs_residual", num(er.max_abs)},
                               {"tolerance", num(cfg.energy_tol)}};
  s.all_pass = s.all_pass && energy_ok;

  const auto envelope = [&](const char* name, Functional f, Envelope env) {
    if (!certified) {
      checks[name] = skipped(not_certified);
      return;
    }
    const EnvelopeCheck c = check_envelope(series, f, env, cfg.slack);
    checks[name] = {{"status", status(c.pass)},
                    {"functional", std::string(to_string(f))},
                    {"initial", num(env.initial)},
                    {"rate", num(env.rate)},
                    {"slack", num(cfg.slack)},
                    {"worst_ratio", num(c.worst_ratio)},
                    {"worst_t", num(c.worst_t)}};
    s.all_pass = s.all_pass && c.pass;
  };
  envelope("e2_envelope", Functional::w_l2_sq, {series.front().w_l2_sq, 2.0 * k.chi});
  envelope("ut_envelope", Functional::ut_w_sq, {pre.J0, k.chi});

  if (certified) {
    const double bound = cfg.boundedness_factor * series.front().second_yz;
    const BoundednessCheck b = check_boundedness(series, Functional::second_yz, bound);
    checks["second_yz_bound"] = {{"status", status(b.pass)},
                                 {"bound", num(bound)},
                                 {"max_value", num(b.max_value)},
                                 {"worst_ratio", num(b.worst_ratio)},
                                 {"worst_t", num(b.worst_t)}};
    s.all_pass = s.all_pass && b.pass;

    const BoundednessCheck ux = check_ux_bound(series, pre.constants_iii.C1, cfg.params.L);
    checks["ux_bound"] = {{"status", status(ux.pass)},
                          {"c1_convention", "estimate_iii"},
                          {"C1", num(pre.constants_iii.C1)},
                          {"max_excess", num(ux.max_value)},
                          {"worst_ratio", num(ux.worst_ratio)},
                          {"worst_t", num(ux.worst_t)}};
    s.all_pass = s.all_pass && ux.pass;
  } else {
    checks["second_yz_bound"] = skipped(not_certified);
    checks["ux_bound"] = skipped(not_certified);
  }

  const Window window{cfg.window_start.value_or(0.2 * series.back().t), series.back().t};
  const auto fit = [&](Functional f) -> ordered_json {
    if (all_zero(series, f)) return {{"status", "zero"}, {"window", {num(window.t_start), num(window.t_end)}}};
    try {
      const DecayFit d = fit_decay_rate(series, f, window);
      return {{"status", "ok"},
              {"rate", num(d.rate)},
              {"r_squared", num(d.r_squared)},
              {"points", d.points},
              {"window", {num(d.window.t_start), num(d.window.t_end)}}};
    } catch (const ValidationError& e) {
      return {{"status", "unavailable"}, {"reason", e.what()}};
    }
  };
  for (Functional f : {Functional::h2_sq, Functional::w_l2_sq, Functional::ut_w_sq, Functional::second_yz}) {
    fits[std::string(to_string(f))] = fit(f);
  }

  const ordered_json& h2 = fits["h2_sq"];
  const double required = cfg.h2_rate_fraction * k.chi;
  if (!certified) {
    checks["h2_rate"] = skipped(not_certified);
  } else if (h2["status"] == "zero") {
    checks["h2_rate"] = {{"status", "pass"}, {"reason", "solution is identically zero"}};
  } else if (h2["status"] != "ok") {
    checks["h2_rate"] = skipped(h2["reason"].get<std::string>());
  } else {
    const double rate = h2["rate"].get<double>();
    const double r2 = h2["r_squared"].get<double>();
    const bool ok = rate >= required && r2 >= cfg.h2_min_r_squared;
    checks["h2_rate"] = {{"status", status(ok)},
                         {"rate", num(rate)},
                         {"required_rate", num(required)},
                         {"r_squared", num(r2)},
                         {"required_r_squared", num(cfg.h2_min_r_squared)}};
    s.all_pass = s.all_pass && ok;
  }

  doc["checks"] = checks;
  doc["fits"] = fits;
  return s;
}

}  // namespace zk::cli
