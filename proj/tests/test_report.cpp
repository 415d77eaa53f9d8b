#include <gtest/gtest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "colehopf/report.hpp"

namespace fs = std::filesystem;
using namespace colehopf;

namespace {

const fs::path kConfigs = COLEHOPF_CONFIG_DIR;

Json base(const char* name) { return read_json_file((kConfigs / name).string()); }

void expect_config_error(const std::function<void()>& f) {
  try {
    f();
    ADD_FAILURE() << "expected a config error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config) << e.what();
  }
}

}  // namespace

TEST(ExitCode, Mapping) {
  for (auto k : {ErrorKind::Config, ErrorKind::ShapeMismatch, ErrorKind::ZeroDispersion, ErrorKind::NotPowerOfTwo,
                 ErrorKind::DomainOrder, ErrorKind::LengthMismatch, ErrorKind::AnchorOutOfRange})
    EXPECT_EQ(exit_code(k), 1);
  EXPECT_EQ(exit_code(ErrorKind::NonPeriodicRamp), 3);
  EXPECT_EQ(exit_code(ErrorKind::BlowUp), 2);
  EXPECT_EQ(exit_code(ErrorKind::Vacuum), 2);
}

TEST(SweepArg, Parses) {
  const auto [axis, values] = parse_sweep_arg("time.dt=1e-3,5e-4,2.5e-4");
  EXPECT_EQ(axis, "time.dt");
  EXPECT_EQ(values, (std::vector<double>{1e-3, 5e-4, 2.5e-4}));
  EXPECT_EQ(parse_sweep_arg("amplitude=+2").second, std::vector<double>{2.0});
}

TEST(SweepArg, RejectsMalformed) {
  for (const char* bad : {"time.dt", "=1,2", "time.dt=", "time.dt=1,,2", "time.dt=1,x", "time.dt=inf"})
    expect_config_error([&] { parse_sweep_arg(bad); });
}

TEST(Sweep, BadAxisFailsBeforeRunning) {
  const auto doc = base("sweep_family_a.json");
  expect_config_error([&] { sweep(doc, "time.dtx", {1e-3}); });
  expect_config_error([&] { sweep(doc, "nonlinearity.family", {1.0}); });
  expect_config_error([&] { sweep(doc, "nonlinearity.drift.3", {1.0}); });
  expect_config_error([&] { sweep(doc, "initial", {1.0}); });
  expect_config_error([&] { sweep(doc, "time.dt", {}); });
}

// The gap is the time-integration mismatch of two RK4 runs, so it falls
// roughly 16x per halving until the spatial floor (~1e-15 for this config).
TEST(Sweep, GapDecreasesWithDt) {
  const auto r = sweep(base("sweep_family_b.json"), "time.dt", {1e-3, 5e-4, 2.5e-4});
  ASSERT_EQ(r.rows.size(), 3u);
  ASSERT_TRUE(r.all_ok());
  for (std::size_t i = 1; i < r.rows.size(); ++i)
    EXPECT_LT(r.rows[i].equivalence_gap, r.rows[i - 1].equivalence_gap)
        << "dt=" << r.rows[i].value << " gap " << r.rows[i].equivalence_gap;
  for (const auto& row : r.rows) {
    EXPECT_TRUE(std::isfinite(row.norm_drift));
    EXPECT_TRUE(std::isfinite(row.observed_order));
  }
}

// drift 1 gives ramp -1/2 (half a turn); drift 2 and 4 give whole turns.
TEST(Sweep, NonQuantizedRampRowFailsOthersSucceed) {
  const auto r = sweep(base("sweep_family_a.json"), "nonlinearity.drift.0", {2.0, 1.0, 4.0});
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_FALSE(r.all_ok());
  EXPECT_TRUE(r.rows[0].ok);
  EXPECT_FALSE(r.rows[1].ok);
  EXPECT_EQ(r.rows[1].error_code, 3);
  EXPECT_NE(r.rows[1].message.find("not periodic"), std::string::npos) << r.rows[1].message;
  EXPECT_TRUE(std::isnan(r.rows[1].equivalence_gap));
  EXPECT_TRUE(r.rows[2].ok);
  EXPECT_LT(r.rows[2].equivalence_gap, 1e-6);
}

TEST(Sweep, SmallAmplitudesConserveNorm) {
  const auto r = sweep(base("sweep_family_b.json"), "amplitude", {0.01, 0.05, 0.1});
  ASSERT_TRUE(r.all_ok());
  for (const auto& row : r.rows) {
    EXPECT_LT(row.norm_drift, 1e-8) << "amplitude " << row.value;
    EXPECT_TRUE(std::isfinite(row.equivalence_gap));
  }
}

TEST(Sweep, SingleValueMatchesVerifyExactly) {
  const auto doc = base("sweep_family_a.json");
  const auto r = sweep(doc, "amplitude", {1.0});
  const auto v = run_verify(parse_config(doc));
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_TRUE(r.rows[0].ok);
  EXPECT_EQ(r.rows[0].norm_drift, v.norm_drift);
  EXPECT_EQ(r.rows[0].equivalence_gap, v.equivalence_gap);
}

TEST(Sweep, RowsKeepInputOrderAndAreDeterministic) {
  const auto doc = base("sweep_family_a.json");
  const auto a = sweep(doc, "amplitude", {1.5, 0.5, 1.0});
  const auto b = sweep(doc, "amplitude", {1.5, 0.5, 1.0});
  ASSERT_EQ(a.rows.size(), 3u);
  EXPECT_EQ(a.rows[0].value, 1.5);
  EXPECT_EQ(a.rows[1].value, 0.5);
  EXPECT_EQ(a.rows[2].value, 1.0);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a.rows[i].equivalence_gap, b.rows[i].equivalence_gap);
    EXPECT_EQ(a.rows[i].norm_drift, b.rows[i].norm_drift);
    EXPECT_EQ(a.rows[i].observed_order, b.rows[i].observed_order);
  }
}

TEST(Sweep, AdjustmentsApplyToEveryRow) {
  const auto r = sweep(base("sweep_family_a.json"), "amplitude", {0.5, 1.0},
                       [](RunConfig& c) { c.tolerance = 1e-300; });
  for (const auto& row : r.rows) {
    EXPECT_FALSE(row.ok);
    EXPECT_EQ(row.error_code, 2);
    EXPECT_NE(row.message.find("exceeds tolerance"), std::string::npos);
    EXPECT_TRUE(std::isfinite(row.equivalence_gap));
  }
}

TEST(SweepCsv, LayoutAndRoundTrip) {
  SweepResult r{"time.dt", {}};
  SweepRow ok;
  ok.value = 1e-3;
  ok.ok = true;
  ok.norm_drift = 1.25e-13;
  ok.equivalence_gap = 0.1 + 0.2;
  ok.observed_order = 3.99;
  SweepRow bad;
  bad.value = 5e-4;
  bad.error_code = 3;
  bad.message = "ramp, not periodic\nsecond line";
  r.rows = {ok, bad};
  const auto dir = fs::temp_directory_path() / ("colehopf_report_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  write_sweep_csv(dir / "sweep.csv", r);
  const auto rows = read_csv(dir / "sweep.csv");
  fs::remove_all(dir);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"axis", "value", "status", "error_code", "message", "norm_drift",
                                               "equivalence_gap", "observed_order"}));
  EXPECT_EQ(rows[1][2], "ok");
  EXPECT_EQ(parse_double(rows[1][6]).value(), 0.1 + 0.2);
  EXPECT_EQ(parse_double(rows[1][5]).value(), 1.25e-13);
  ASSERT_EQ(rows[2].size(), 8u);
  EXPECT_EQ(rows[2][2], "failed");
  EXPECT_EQ(rows[2][3], "3");
  EXPECT_EQ(rows[2][4], "ramp; not periodic;second line");
  EXPECT_EQ(rows[2][6], "nan");
}
