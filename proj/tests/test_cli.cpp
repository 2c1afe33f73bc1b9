#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/report.hpp"

namespace {

namespace fs = std::filesystem;
using namespace zk::cli;

const char* kPiBox =
    "L = 3.141592653589793\n"
    "B_y = 3.141592653589793\n"
    "B_z = 3.141592653589793\n";

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string decay_text(double amplitude, double t_end, double c_s = 1.0) {
  std::ostringstream s;
  s << "# small decay run\nscenario = decay\n" << kPiBox << "c_s = " << c_s
    << "\nn_x = 13\nn_y = 13\nn_z = 13\ndt = 0.02\nt_end = " << t_end << "\namplitude = " << amplitude
    << "\nrecord_every = 5\n";
  return s.str();
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("zk_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }
  fs::path dir_;
};

TEST(Config, ParsesValuesAndComments) {
  const RunConfig c = parse(decay_text(1e-4, 0.1) + "  seed = 99   # trailing\n\nc1_convention = estimate_iii\n");
  EXPECT_EQ(c.scenario, Scenario::decay);
  EXPECT_DOUBLE_EQ(c.params.L, 3.141592653589793);
  EXPECT_EQ(c.n_y, 13);
  EXPECT_EQ(*c.amplitude, 1e-4);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.c1_convention, zk::C1Convention::estimate_iii);
}

TEST(Config, ErrorsCarryLineAndKey) {
  const auto expect_error = [](const std::string& text, int line, const std::string& key) {
    try {
      parse(text);
      FAIL() << "no error for:\n" << text;
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.line(), line) << e.what();
      EXPECT_EQ(e.key(), key) << e.what();
    }
  };
  expect_error(decay_text(1e-4, 0.1) + "bogus = 1\n", 14, "bogus");
  expect_error(decay_text(1e-4, 0.1) + "dt = 0.01\n", 14, "dt");
  expect_error("scenario = decay\nL = abc\n", 2, "L");
  expect_error("scenario = decay\nL = inf\n", 2, "L");
  expect_error("scenario = decay\nthis line has no equals\n", 2, "");
  expect_error("scenario = orbit\n", 1, "scenario");
  expect_error("L = 1\n", 0, "scenario");
  std::string no_dt = decay_text(1e-4, 0.1);
  no_dt.replace(no_dt.find("dt = 0.02\n"), 10, "");
  expect_error(no_dt, 0, "dt");
  expect_error(decay_text(1e-4, 0.1) + "n_x = 1.5\n", 14, "n_x");
}

TEST(Config, RequiredKeysPerScenario) {
  EXPECT_NO_THROW(parse(std::string("scenario = ineq\n") + kPiBox + "c_s = 1\nn_x = 9\nn_y = 9\nn_z = 9\nseed = 1\n"));
  EXPECT_THROW(parse(std::string("scenario = mms\n") + kPiBox + "c_s = 1\ndt = 0.02\nt_end = 0.5\namplitude = 1\n"),
               ConfigError);
  const RunConfig m =
      parse(std::string("scenario = mms\n") + kPiBox + "c_s = 1\nladder = 9, 13,17\ndt = 0.02\nt_end = 0.5\namplitude = 1\n");
  EXPECT_EQ(m.ladder, (std::vector<int>{9, 13, 17}));
}

TEST(Csv, HeaderAndRoundTrip) {
  EXPECT_STREQ(kCsvHeader,
               "t,l2_sq,w_l2_sq,trace_x0,trace_accum,ux_sq,uy_sq,uz_sq,h2_sq,ut_w_sq,second_yz,uxx_sq");
  zk::DiagnosticsRecord r;
  r.t = 0.1;
  r.l2_sq = 1.0 / 3.0;
  r.h2_sq = 2.718281828459045e-300;
  r.uxx_sq = 123456789.123456789;
  std::stringstream s;
  write_csv(s, std::vector<zk::DiagnosticsRecord>{r, r});
  const auto back = read_csv(s);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].l2_sq, r.l2_sq);
  EXPECT_EQ(back[1].h2_sq, r.h2_sq);
  EXPECT_EQ(back[1].uxx_sq, r.uxx_sq);
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  std::istringstream bad("t,l2\n1,2\n");
  EXPECT_THROW(read_csv(bad), zk::ValidationError);
}

TEST(Check, PiBoxPassesAndCs2Fails) {
  std::ostringstream out;
  EXPECT_EQ(cmd_check(parse(decay_text(0.0, 0.0)), out), kOk);
  EXPECT_NE(out.str().find("K2  4.625"), std::string::npos);
  EXPECT_NE(out.str().find("C1 (estimate_iii)"), std::string::npos);
  std::ostringstream out2;
  EXPECT_EQ(cmd_check(parse(decay_text(0.0, 0.0, 2.0)), out2), kCertificateFailed);
  EXPECT_NE(out2.str().find("cond_K2: FAIL"), std::string::npos);
}

TEST_F(TempDir, GuardedMapsConfigErrorsToTwo) {
  std::ostringstream err;
  const int code = guarded(write("bad.cfg", "scenario = decay\nL = x\n"), err, [](const RunConfig&) { return 0; });
  EXPECT_EQ(code, kInputError);
  EXPECT_NE(err.str().find("line 2"), std::string::npos);
  EXPECT_EQ(guarded(path("missing.cfg"), err, [](const RunConfig&) { return 0; }), kInputError);
}

TEST_F(TempDir, RunZeroEndTimeWritesOneRow) {
  std::ostringstream out;
  const RunConfig c = parse(decay_text(1e-4, 0.0));
  ASSERT_EQ(cmd_run(c, path("a.csv"), path("a.json"), out), kOk);
  const std::string csv = slurp(path("a.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kCsvHeader);
}

TEST_F(TempDir, RunZeroAmplitudeAllZeroAndPasses) {
  std::ostringstream out;
  ASSERT_EQ(cmd_run(parse(decay_text(0.0, 0.2)), path("z.csv"), path("z.json"), out), kOk);
  std::ifstream in(path("z.csv"));
  for (const auto& r : read_csv(in)) {
    EXPECT_EQ(r.l2_sq + r.w_l2_sq + r.trace_x0 + r.trace_accum + r.ux_sq + r.uy_sq + r.uz_sq + r.h2_sq + r.ut_w_sq +
                  r.second_yz + r.uxx_sq,
              0.0);
  }
}

TEST_F(TempDir, RunSummaryRoundTripAndDeterminism) {
  const std::string cfg = write("d.cfg", decay_text(1e-4, 0.4));
  const RunConfig c = load_config(cfg);
  std::ostringstream out;
  // 0.4 time units is too short for the H2 rate fit; every other check passes.
  ASSERT_EQ(cmd_run(c, path("a.csv"), path("a.json"), out), kCheckFailed) << out.str();
  ASSERT_EQ(cmd_run(c, path("b.csv"), path("b.json"), out), kCheckFailed);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_EQ(cmd_verify(c, path("a.csv"), path("a.json"), out), kOk);

  const auto doc = nlohmann::ordered_json::parse(slurp(path("a.json")));
  std::vector<std::string> keys;
  for (const auto& [k, v] : doc.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"constants", "certificate", "checks", "fits"}));
  for (const char* k : {"energy_identity", "e2_envelope", "ut_envelope", "second_yz_bound", "ux_bound"}) {
    EXPECT_EQ(doc["checks"][k]["status"], "pass") << k;
  }
  EXPECT_EQ(doc["checks"]["h2_rate"]["status"], "fail");
  EXPECT_TRUE(doc["certificate"]["overall"].get<bool>());
}

TEST_F(TempDir, RunWithFailedCertificateSkipsPhysicsChecks) {
  std::ostringstream out;
  // n = 13 leaves a 1.7% energy residual at c_s = 2.
  const int code = cmd_run(parse(decay_text(1e-4, 0.2, 2.0) + "energy_tol = 0.05\n"), "", path("s.json"), out);
  EXPECT_EQ(code, kOk) << out.str();
  const auto doc = nlohmann::ordered_json::parse(slurp(path("s.json")));
  for (const char* k : {"e2_envelope", "ut_envelope", "second_yz_bound", "ux_bound", "h2_rate"}) {
    EXPECT_EQ(doc["checks"][k]["status"], "skipped") << k;
  }
  EXPECT_FALSE(doc["certificate"]["overall"].get<bool>());
  EXPECT_EQ(doc["checks"]["energy_identity"]["status"], "pass");
}

TEST_F(TempDir, RunUnwritableOutputIsInputError) {
  std::ostringstream err;
  const std::string cfg = write("d.cfg", decay_text(1e-4, 0.0));
  const int code = guarded(cfg, err, [&](const RunConfig& c) {
    std::ostringstream out;
    return cmd_run(c, (dir_ / "no" / "such" / "dir.csv").string(), "", out);
  });
  EXPECT_EQ(code, kInputError);
}

TEST_F(TempDir, RunPhysicsFailureIsFour) {
  std::ostringstream out;
  RunConfig c = parse(decay_text(1e-4, 0.2) + "energy_tol = 0\n");
  EXPECT_EQ(cmd_run(c, "", "", out), kCheckFailed);
}

TEST(Mms, ExactAndTooShortLadder) {
  const std::string base = std::string("scenario = mms\n") + kPiBox + "c_s = 1\ndt = 0.05\nt_end = 0.1\n";
  std::ostringstream out;
  EXPECT_EQ(cmd_mms(parse(base + "amplitude = 0\nladder = 9, 13, 17\n"), out), kOk);
  EXPECT_NE(out.str().find("exact"), std::string::npos);
  std::ostringstream err;
  const int code = [&] {
    try {
      std::ostringstream o;
      return cmd_mms(parse(base + "amplitude = 0.5\nladder = 9\n"), o);
    } catch (...) {
      return report_exception(err);
    }
  }();
  EXPECT_EQ(code, kInputError);
}

TEST(Ineq, DefaultPassesZeroSlackFails) {
  const std::string base = std::string("scenario = ineq\n") + kPiBox + "c_s = 1\nn_x = 17\nn_y = 17\nn_z = 17\nseed = 3\nsamples = 20\n";
  std::ostringstream a;
  std::ostringstream b;
  EXPECT_EQ(cmd_ineq(parse(base), a), kOk);
  EXPECT_EQ(cmd_ineq(parse(base), b), kOk);
  EXPECT_EQ(a.str(), b.str());
  std::ostringstream c;
  EXPECT_EQ(cmd_ineq(parse(base + "steklov_slack = 0\n"), c), kCheckFailed);
}

TEST(Compare, IdenticalZeroAndIncompatibleRejected) {
  const std::string base = std::string("scenario = compare\n") + kPiBox +
                           "c_s = 1\nn_x = 13\nn_y = 13\nn_z = 13\ndt = 0.02\nt_end = 0.2\namplitude = 1e-3\n"
                           "record_every = 5\ndeltas = 1e-2, 1e-3, 1e-4\n";
  std::ostringstream out;
  EXPECT_EQ(cmd_compare(parse(base), out), kOk);
  EXPECT_NE(out.str().find("identical data: ratio 0\n"), std::string::npos);
  std::ostringstream err;
  const int code = [&] {
    try {
      std::ostringstream o;
      return cmd_compare(parse(base + "perturbation = sine_x\n"), o);
    } catch (...) {
      return report_exception(err);
    }
  }();
  EXPECT_EQ(code, kInputError);
  EXPECT_NE(err.str().find("residual"), std::string::npos);
}

}  // namespace
