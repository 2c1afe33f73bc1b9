#include "config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace zk::cli {

std::string_view to_string(Scenario s) noexcept {
  switch (s) {
    case Scenario::decay: return "decay";
    case Scenario::mms: return "mms";
    case Scenario::ineq: return "ineq";
    case Scenario::compare: return "compare";
  }
  return "";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

[[noreturn]] void fail(const std::string& key, int line, const std::string& why) {
  std::ostringstream msg;
  if (line > 0) msg << "line " << line << ": ";
  msg << "key '" << key << "': " << why;
  throw ConfigError(msg.str(), line, key);
}

double parse_real(const std::string& key, const Entry& e) {
  const char* begin = e.value.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
    fail(key, e.line, "'" + e.value + "' is not a finite number");
  }
  return v;
}

long long parse_integer(const std::string& key, const Entry& e) {
  const char* begin = e.value.c_str();
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(begin, &end, 10);
  if (end == begin || *end != '\0' || errno == ERANGE) fail(key, e.line, "'" + e.value + "' is not an integer");
  return v;
}

int parse_int(const std::string& key, const Entry& e) {
  const long long v = parse_integer(key, e);
  if (v < -2147483647LL || v > 2147483647LL) fail(key, e.line, "integer out of range");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const Entry& e) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  fail(key, e.line, "'" + e.value + "' is not a boolean (true/false)");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "scenario",     "L",           "B_y",          "B_z",           "c_s",
      "n_x",          "n_y",         "n_z",          "dt",            "t_end",
      "amplitude",    "record_every", "c1_convention", "slack",        "seed",
      "nonlinear_mode", "picard_tol", "picard_max_iter", "nonlinear",  "damped_startup",
      "energy_tol",   "boundedness_factor", "window_start", "h2_rate_fraction", "h2_min_r_squared",
      "ladder",       "mms_lambda",  "samples",      "steklov_slack", "interp_tol",
      "deltas",       "perturbation", "compare_factor"};
  return keys;
}

}  // namespace

const std::vector<std::string>& required_keys(Scenario s) {
  static const std::vector<std::string> decay{"scenario", "L", "B_y", "B_z", "c_s", "n_x", "n_y", "n_z",
                                              "dt", "t_end", "amplitude", "record_every"};
  static const std::vector<std::string> mms{"scenario", "L", "B_y", "B_z", "c_s", "ladder", "dt", "t_end",
                                            "amplitude"};
  static const std::vector<std::string> ineq{"scenario", "L", "B_y", "B_z", "c_s", "n_x", "n_y", "n_z", "seed"};
  static const std::vector<std::string> compare{"scenario", "L", "B_y", "B_z", "c_s", "n_x", "n_y", "n_z",
                                                "dt", "t_end", "amplitude", "record_every", "deltas"};
  switch (s) {
    case Scenario::decay: return decay;
    case Scenario::mms: return mms;
    case Scenario::ineq: return ineq;
    case Scenario::compare: return compare;
  }
  return decay;
}

RunConfig parse_config(std::istream& in) {
  std::map<std::string, Entry> entries;
  std::string raw_line;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    std::string line = raw_line;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected 'key = value', got '" << line << "'";
      throw ConfigError(msg.str(), line_no, "");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(key, line_no, "empty key");
    if (!known_keys().contains(key)) fail(key, line_no, "unknown key");
    if (value.empty()) fail(key, line_no, "missing value");
    if (entries.contains(key)) fail(key, line_no, "duplicate key (first set on line " + std::to_string(entries[key].line) + ")");
    entries[key] = {value, line_no};
  }

  RunConfig cfg;
  for (const auto& [k, e] : entries) cfg.raw[k] = e.value;

  const auto it = entries.find("scenario");
  if (it == entries.end()) fail("scenario", 0, "required key missing");
  const std::string& sc = it->second.value;
  if (sc == "decay") {
    cfg.scenario = Scenario::decay;
  } else if (sc == "mms") {
    cfg.scenario = Scenario::mms;
  } else if (sc == "ineq") {
    cfg.scenario = Scenario::ineq;
  } else if (sc == "compare") {
    cfg.scenario = Scenario::compare;
  } else {
    fail("scenario", it->second.line, "'" + sc + "' is not one of decay, mms, ineq, compare");
  }
  const auto with = [&](const char* key, const std::function<void(const Entry&)>& apply) {
    if (const auto f = entries.find(key); f != entries.end()) apply(f->second);
  };
  with("L", [&](const Entry& e) { cfg.params.L = parse_real("L", e); });
  with("B_y", [&](const Entry& e) { cfg.params.B_y = parse_real("B_y", e); });
  with("B_z", [&](const Entry& e) { cfg.params.B_z = parse_real("B_z", e); });
  with("c_s", [&](const Entry& e) { cfg.params.c_s = parse_real("c_s", e); });
  with("n_x", [&](const Entry& e) { cfg.n_x = parse_int("n_x", e); });
  with("n_y", [&](const Entry& e) { cfg.n_y = parse_int("n_y", e); });
  with("n_z", [&](const Entry& e) { cfg.n_z = parse_int("n_z", e); });
  with("dt", [&](const Entry& e) { cfg.dt = parse_real("dt", e); });
  with("t_end", [&](const Entry& e) { cfg.t_end = parse_real("t_end", e); });
  with("amplitude", [&](const Entry& e) { cfg.amplitude = parse_real("amplitude", e); });
  with("record_every", [&](const Entry& e) { cfg.record_every = parse_int("record_every", e); });
  with("c1_convention", [&](const Entry& e) {
    try {
      cfg.c1_convention = parse_c1_convention(e.value);
    } catch (const ValidationError& err) {
      fail("c1_convention", e.line, err.what());
    }
  });
  with("slack", [&](const Entry& e) { cfg.slack = parse_real("slack", e); });
  with("seed", [&](const Entry& e) {
    const long long v = parse_integer("seed", e);
    if (v < 0) fail("seed", e.line, "must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(v);
  });
  with("nonlinear_mode", [&](const Entry& e) {
    try {
      cfg.nonlinear_mode = parse_nonlinear_mode(e.value);
    } catch (const ValidationError& err) {
      fail("nonlinear_mode", e.line, err.what());
    }
  });
  with("picard_tol", [&](const Entry& e) { cfg.picard.tol = parse_real("picard_tol", e); });
  with("picard_max_iter", [&](const Entry& e) { cfg.picard.max_iter = parse_int("picard_max_iter", e); });
  with("nonlinear", [&](const Entry& e) { cfg.nonlinear = parse_bool("nonlinear", e); });
  with("damped_startup", [&](const Entry& e) { cfg.damped_startup = parse_bool("damped_startup", e); });
  with("energy_tol", [&](const Entry& e) { cfg.energy_tol = parse_real("energy_tol", e); });
  with("boundedness_factor", [&](const Entry& e) { cfg.boundedness_factor = parse_real("boundedness_factor", e); });
  with("window_start", [&](const Entry& e) { cfg.window_start = parse_real("window_start", e); });
  with("h2_rate_fraction", [&](const Entry& e) { cfg.h2_rate_fraction = parse_real("h2_rate_fraction", e); });
  with("h2_min_r_squared", [&](const Entry& e) { cfg.h2_min_r_squared = parse_real("h2_min_r_squared", e); });
  with("ladder", [&](const Entry& e) {
    cfg.ladder.clear();
    for (const std::string& item : split_list(e.value)) cfg.ladder.push_back(parse_int("ladder", {item, e.line}));
  });
  with("mms_lambda", [&](const Entry& e) { cfg.mms_lambda = parse_real("mms_lambda", e); });
  with("samples", [&](const Entry& e) { cfg.samples = parse_int("samples", e); });
  with("steklov_slack", [&](const Entry& e) { cfg.steklov_slack = parse_real("steklov_slack", e); });
  with("interp_tol", [&](const Entry& e) { cfg.interp_tol = parse_real("interp_tol", e); });
  with("deltas", [&](const Entry& e) {
    cfg.deltas.clear();
    for (const std::string& item : split_list(e.value)) cfg.deltas.push_back(parse_real("deltas", {item, e.line}));
    if (cfg.deltas.empty()) fail("deltas", e.line, "empty list");
  });
  with("perturbation", [&](const Entry& e) {
    if (e.value == "scale") {
      cfg.perturbation = Perturbation::scale;
    } else if (e.value == "sine_x") {
      cfg.perturbation = Perturbation::sine_x;
    } else {
      fail("perturbation", e.line, "'" + e.value + "' is not one of scale, sine_x");
    }
  });
  with("compare_factor", [&](const Entry& e) { cfg.compare_factor = parse_real("compare_factor", e); });

  // Range checks that do not need the solver.
  with("samples", [&](const Entry& e) {
    if (cfg.samples < 1) fail("samples", e.line, "must be >= 1");
  });
  with("slack", [&](const Entry& e) {
    if (cfg.slack < 0.0) fail("slack", e.line, "must be >= 0");
  });
  with("steklov_slack", [&](const Entry& e) {
    if (cfg.steklov_slack < 0.0) fail("steklov_slack", e.line, "must be >= 0");
  });
  for (const std::string& k : required_keys(cfg.scenario)) {
    if (!entries.contains(k)) fail(k, 0, "required key missing for scenario " + sc);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", 0, "");
  return parse_config(in);
}

SolverConfig RunConfig::solver_config() const {
  SolverConfig s;
  s.params = params;
  s.n_x = n_x;
  s.n_y = n_y;
  s.n_z = n_z;
  s.dt = dt;
  s.t_end = t_end;
  s.nonlinear_mode = nonlinear_mode;
  s.picard = picard;
  s.nonlinear = nonlinear;
  s.damped_startup = damped_startup;
  s.record_every = record_every;
  s.validate();
  return s;
}

Grid3 RunConfig::grid() const { return make_grid(params.L, params.B_y, params.B_z, n_x, n_y, n_z); }

}  // namespace zk::cli
