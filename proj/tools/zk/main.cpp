#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace zk::cli;
  CLI::App app{"zk: box-domain Zakharov-Kuznetsov simulator and verification harness"};
  app.require_subcommand(1);

  std::string config;
  std::string csv;
  std::string summary;
  std::string out;

  const auto add = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config, "configuration file")->required();
    sub->add_option("-o,--out", out, "also write the report to this file");
    return sub;
  };
  add("check", "print theory constants and the hypothesis certificate");
  CLI::App* run = add("run", "simulate a decay scenario and write diagnostics");
  run->add_option("--csv", csv, "diagnostics time series (CSV)");
  run->add_option("--summary", summary, "checks and fits (JSON)");
  add("mms", "manufactured-solution refinement study");
  add("ineq", "randomized functional-inequality suites");
  add("compare", "continuous-dependence experiment");
  CLI::App* verify = add("verify", "rebuild a run summary from its CSV and compare");
  verify->add_option("--csv", csv, "diagnostics CSV")->required();
  verify->add_option("--summary", summary, "summary JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  std::ostringstream report;
  const int code = guarded(config, std::cerr, [&](const RunConfig& cfg) {
    if (name == "check") return cmd_check(cfg, report);
    if (name == "run") return cmd_run(cfg, csv, summary, report);
    if (name == "mms") return cmd_mms(cfg, report);
    if (name == "ineq") return cmd_ineq(cfg, report);
    if (name == "compare") return cmd_compare(cfg, report);
    return cmd_verify(cfg, csv, summary, report);
  });
  std::cout << report.str();
  if (!out.empty()) {
    std::ofstream f(out);
    f << report.str();
    if (!f) {
      std::cerr << "i/o error: cannot write '" << out << "'\n";
      return kInputError;
    }
  }
  return code;
}
