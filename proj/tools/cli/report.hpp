#pragma once

// CSV time series and the run summary. The summary is a pure function of the
// configuration and the recorded series, so rebuilding it from a parsed CSV
// gives the same document.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "config.hpp"
#include "zk/diagnostics.hpp"
#include "zk/theory.hpp"

namespace zk::cli {

inline constexpr const char* kCsvHeader =
    "t,l2_sq,w_l2_sq,trace_x0,trace_accum,ux_sq,uy_sq,uz_sq,h2_sq,ut_w_sq,second_yz,uxx_sq";

/// %.17g, which round-trips every double.
std::string format_real(double v);

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const DiagnosticsRecord& r);
void write_csv(std::ostream& out, std::span<const DiagnosticsRecord> series);

/// Throws ValidationError on a wrong header or malformed row.
std::vector<DiagnosticsRecord> read_csv(std::istream& in);

/// Constants, J0 and certificate for the configured bump.
struct Prelude {
  double u0_l2 = 0.0;
  double J0 = 0.0;
  TheoryConstants constants;
  TheoryConstants constants_iii;
  HypothesisCertificate certificate;
};

Prelude make_prelude(const RunConfig& cfg);

struct Summary {
  nlohmann::ordered_json doc;
  bool all_pass = true;
};

Summary make_summary(const RunConfig& cfg, const Prelude& pre, std::span<const DiagnosticsRecord> series);

}  // namespace zk::cli
