#pragma once

// Flat `key = value` run configuration. One assignment per line, `#` starts a
// comment, blank lines are ignored. Unknown and duplicate keys are rejected.

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zk/errors.hpp"
#include "zk/solver.hpp"
#include "zk/theory.hpp"

namespace zk::cli {

/// Configuration problem; line is 0 when the error is not tied to one line.
class ConfigError : public ValidationError {
 public:
  ConfigError(const std::string& what, int line, std::string key)
      : ValidationError(what), line_(line), key_(std::move(key)) {}
  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  int line_;
  std::string key_;
};

enum class Scenario { decay, mms, ineq, compare };

std::string_view to_string(Scenario s) noexcept;

enum class Perturbation { scale, sine_x };

struct RunConfig {
  Scenario scenario = Scenario::decay;
  PhysParams params;
  int n_x = 49;
  int n_y = 49;
  int n_z = 49;
  double dt = 2e-3;
  double t_end = 5.0;
  std::optional<double> amplitude;
  int record_every = 25;
  C1Convention c1_convention = C1Convention::theorem_statement;
  double slack = 0.05;
  std::uint64_t seed = 20240501;

  NonlinearMode nonlinear_mode = NonlinearMode::picard;
  PicardOptions picard;
  bool nonlinear = true;
  bool damped_startup = true;
  double energy_tol = 1e-2;
  double boundedness_factor = 2.0;
  std::optional<double> window_start;  // decay-fit window start; default 0.2 t_end
  double h2_rate_fraction = 0.9;
  double h2_min_r_squared = 0.95;

  std::vector<int> ladder{17, 25, 33};
  double mms_lambda = 1.0;

  int samples = 100;
  double steklov_slack = 5.0;
  double interp_tol = 1e-8;

  std::vector<double> deltas{1e-2, 1e-3, 1e-4};
  Perturbation perturbation = Perturbation::scale;
  double compare_factor = 2.0;

  /// Keys present in the file (for reports).
  std::map<std::string, std::string> raw;

  SolverConfig solver_config() const;
  Grid3 grid() const;
};

/// Throws ConfigError with the offending line and key.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Keys that must be present for a scenario.
const std::vector<std::string>& required_keys(Scenario s);

}  // namespace zk::cli
