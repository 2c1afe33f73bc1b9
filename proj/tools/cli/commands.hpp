#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"

namespace zk::cli {

/// Process exit codes. Nothing else is ever returned.
enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kCertificateFailed = 3,
  kCheckFailed = 4,
};

int cmd_check(const RunConfig& cfg, std::ostream& out);

/// Writes the CSV and the JSON summary; either path may be empty to skip it.
int cmd_run(const RunConfig& cfg, const std::string& csv_path, const std::string& summary_path,
            std::ostream& out);

int cmd_mms(const RunConfig& cfg, std::ostream& out);
int cmd_ineq(const RunConfig& cfg, std::ostream& out);
int cmd_compare(const RunConfig& cfg, std::ostream& out);

/// Rebuilds the summary of a decay run from its CSV and compares it with the
/// stored summary text. Returns kOk on an exact match.
int cmd_verify(const RunConfig& cfg, const std::string& csv_path, const std::string& summary_path,
               std::ostream& out);

/// Loads the config and runs a command, mapping every exception onto the exit
/// code contract. Diagnostics go to err.
template <class Fn>
int guarded(const std::string& config_path, std::ostream& err, Fn&& fn);

int report_exception(std::ostream& err);

template <class Fn>
int guarded(const std::string& config_path, std::ostream& err, Fn&& fn) {
  try {
    const RunConfig cfg = load_config(config_path);
    return fn(cfg);
  } catch (...) {
    return report_exception(err);
  }
}

}  // namespace zk::cli
