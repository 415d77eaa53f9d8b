// End-to-end checks of the colehopf executable against the shipped configs.

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "colehopf/config.hpp"
#include "colehopf/io.hpp"

namespace fs = std::filesystem;
using namespace colehopf;

namespace {

const fs::path kConfigs = COLEHOPF_CONFIG_DIR;

struct Run {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fresh scratch directory per test.
fs::path scratch() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  auto dir = fs::temp_directory_path() /
             ("colehopf_cli_" + std::to_string(::getpid()) + "_" + info->test_suite_name() + "_" + info->name());
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Run run(const std::string& args, const fs::path& dir) {
  const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd =
      std::string("'") + COLEHOPF_CLI + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string cfg(const char* name) { return "'" + (kConfigs / name).string() + "'"; }

std::string out_flag(const fs::path& dir) { return "--output-dir '" + (dir / "out").string() + "' "; }

fs::path write_config(const fs::path& dir, const char* name, const Json& doc) {
  const auto p = dir / name;
  std::ofstream(p) << doc.dump(2);
  return p;
}

double cell(const std::vector<std::string>& row, std::size_t c) {
  const auto v = parse_double(row.at(c));
  EXPECT_TRUE(v.has_value()) << "cell '" << row.at(c) << "'";
  return v.value_or(std::nan(""));
}

}  // namespace

// simulate

TEST(Simulate, LinearConfigConservesNorm) {
  const auto dir = scratch();
  const auto r = run(out_flag(dir) + "simulate " + cfg("linear.json"), dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_csv(dir / "out" / "diagnostics.csv");
  ASSERT_EQ(rows[0], (std::vector<std::string>{"t", "N_1", "drift_1", "cont_res_1"}));
  EXPECT_LT(std::abs(cell(rows.back(), 2)), 1e-10);
  EXPECT_DOUBLE_EQ(cell(rows.back(), 0), 1.0);
}

TEST(Simulate, WrongNumberOfDispersionCoefficientsNamesA) {
  const auto dir = scratch();
  auto doc = read_json_file((kConfigs / "family_b.json").string());
  doc["A"] = {1.0, 0.8, 0.5};
  const auto path = write_config(dir, "bad.json", doc);
  const auto r = run(out_flag(dir) + "simulate '" + path.string() + "'", dir);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("'A'"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "out" / "diagnostics.csv"));
}

TEST(Simulate, UnknownKeyIsAConfigError) {
  const auto dir = scratch();
  auto doc = read_json_file((kConfigs / "linear.json").string());
  doc["time"]["dtt"] = 1e-3;
  const auto path = write_config(dir, "bad.json", doc);
  const auto r = run(out_flag(dir) + "simulate '" + path.string() + "'", dir);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("dtt"), std::string::npos) << r.err;
}

TEST(Simulate, MissingConfigFileIsAConfigError) {
  const auto dir = scratch();
  EXPECT_EQ(run("simulate '" + (dir / "nope.json").string() + "'", dir).code, 1);
}

TEST(Simulate, FamilyBRowCountAndSnapshots) {
  const auto dir = scratch();
  const auto c = load_config((kConfigs / "family_b.json").string());
  const auto r = run(out_flag(dir) + "simulate " + cfg("family_b.json"), dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_csv(dir / "out" / "diagnostics.csv");
  const auto expected = static_cast<std::size_t>(std::llround(c.time.t_end / (c.time.dt * c.time.sample_every))) + 1;
  ASSERT_EQ(rows.size() - 1, expected);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "N_1", "N_2", "drift_1", "drift_2", "cont_res_1", "cont_res_2"}));
  for (std::size_t i = 1; i < rows.size(); ++i)
    for (std::size_t col : {3u, 4u}) EXPECT_LT(std::abs(cell(rows[i], col)), 1e-8);

  // One snapshot per row; the last one matches the final time and shape.
  const auto snaps = dir / "out" / "snapshots";
  std::size_t bins = 0;
  for (const auto& e : fs::directory_iterator(snaps)) bins += e.path().extension() == ".bin";
  EXPECT_EQ(bins, expected);
  const auto last = read_snapshot(snaps, "psi_" + std::string(6 - std::to_string(expected - 1).size(), '0') +
                                             std::to_string(expected - 1));
  EXPECT_EQ(last.species, 2u);
  EXPECT_EQ(last.points, 256u);
  EXPECT_EQ(format_double(last.t), rows.back()[0]);
  EXPECT_EQ(fs::file_size(snaps / "psi_000000.bin"), 2u * 256u * 16u);

  // The snapshot norm agrees with the tabulated N_k.
  double n1 = 0.0;
  for (std::size_t i = 0; i < last.points; ++i) n1 += std::norm(last.values[i]);
  n1 *= c.grid.x_max / static_cast<double>(last.points);
  EXPECT_NEAR(n1, cell(rows.back(), 1), 1e-13);
}

TEST(Simulate, OutputIsDeterministic) {
  const auto dir = scratch();
  ASSERT_EQ(run("--output-dir '" + (dir / "a").string() + "' simulate " + cfg("linear.json"), dir).code, 0);
  ASSERT_EQ(run("--output-dir '" + (dir / "b").string() + "' simulate " + cfg("linear.json"), dir).code, 0);
  EXPECT_EQ(slurp(dir / "a" / "diagnostics.csv"), slurp(dir / "b" / "diagnostics.csv"));
  EXPECT_EQ(slurp(dir / "a" / "snapshots" / "psi_000001.bin"), slurp(dir / "b" / "snapshots" / "psi_000001.bin"));
  EXPECT_EQ(slurp(dir / "a" / "diagnostics.csv").find('\r'), std::string::npos);
}

TEST(Simulate, CsvNumbersRoundTrip) {
  const auto dir = scratch();
  ASSERT_EQ(run(out_flag(dir) + "simulate " + cfg("linear.json"), dir).code, 0);
  for (const auto& row : read_csv(dir / "out" / "diagnostics.csv")) {
    if (row[0] == "t") continue;
    for (const auto& s : row) EXPECT_EQ(format_double(cell({s}, 0)), s);
  }
}

// transform

namespace {

struct CoefficientRow {
  std::string table;
  std::string k, j, i;
  double value;
};

std::vector<CoefficientRow> coefficients(const fs::path& csv) {
  const auto rows = read_csv(csv);
  EXPECT_EQ(rows.at(0), (std::vector<std::string>{"table", "k", "j", "i", "value"}));
  std::vector<CoefficientRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r)
    out.push_back({rows[r][0], rows[r][1], rows[r][2], rows[r][3], cell(rows[r], 4)});
  return out;
}

}  // namespace

TEST(Transform, CaseOneGivesAllZeroRows) {
  const auto dir = scratch();
  const auto r = run(out_flag(dir) + "transform " + cfg("case1.json"), dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = coefficients(dir / "out" / "transformed_coefficients.csv");
  EXPECT_EQ(rows.size(), 4u + 4u + 4u + 8u + 2u);
  for (const auto& row : rows) EXPECT_EQ(row.value, 0.0) << row.table << " " << row.k << row.j << row.i;
  EXPECT_FALSE(fs::exists(dir / "out" / "phi_initial.bin"));
}

TEST(Transform, ZeroDeltaPassesCoefficientsThrough) {
  const auto dir = scratch();
  const auto c = load_config((kConfigs / "delta0.json").string());
  const auto r = run(out_flag(dir) + "transform " + cfg("delta0.json"), dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto& n = c.nonlinearity;
  for (const auto& row : coefficients(dir / "out" / "transformed_coefficients.csv")) {
    const auto k = std::stoul(row.k) - 1;
    if (row.table == "drift_self") {
      EXPECT_EQ(row.value, n.beta(k, std::stoul(row.j) - 1));
    }
    if (row.table == "drift_cross") {
      EXPECT_EQ(row.value, n.gamma(k, std::stoul(row.j) - 1));
    }
    if (row.table == "quartic") {
      EXPECT_EQ(row.value, n.lambda(k, std::stoul(row.j) - 1, std::stoul(row.i) - 1));
    }
    if (row.table == "cubic" || row.table == "const_shift") {
      EXPECT_EQ(row.value, 0.0);
    }
  }
  // sigma == 0, so the gauge image of psi_0 is psi_0 itself.
  const auto phi = read_snapshot(dir / "out", "phi_initial");
  const auto psi = build_initial(c);
  ASSERT_EQ(phi.values.size(), 2u * 256u);
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t i = 0; i < 256; ++i) EXPECT_EQ(phi.values[k * 256 + i], psi[k][i]);
}

TEST(Transform, ChenLeeLiuRows) {
  const auto dir = scratch();
  ASSERT_EQ(run(out_flag(dir) + "transform " + cfg("chen_lee_liu.json"), dir).code, 0);
  int seen = 0;
  for (const auto& row : coefficients(dir / "out" / "transformed_coefficients.csv")) {
    if (row.table == "drift_self") {
      EXPECT_EQ(row.value, 0.0);
      ++seen;
    }
    if (row.table == "drift_cross") {
      EXPECT_EQ(row.value, -4.0);
      ++seen;
    }
    if (row.table == "quartic") {
      EXPECT_EQ(row.value, 3.0);
      ++seen;
    }
  }
  EXPECT_EQ(seen, 3);
}

TEST(Transform, PhiInitialIsUnitaryImage) {
  const auto dir = scratch();
  const auto c = load_config((kConfigs / "family_b.json").string());
  ASSERT_EQ(run(out_flag(dir) + "transform " + cfg("family_b.json"), dir).code, 0);
  const auto phi = read_snapshot(dir / "out", "phi_initial");
  const auto psi = build_initial(c);
  EXPECT_EQ(phi.t, 0.0);
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t i = 0; i < 256; ++i) EXPECT_NEAR(std::norm(phi.values[k * 256 + i]), std::norm(psi[k][i]), 1e-14);
}

TEST(Transform, NonPeriodicRampExitsThree) {
  const auto dir = scratch();
  const auto r = run(out_flag(dir) + "transform " + cfg("family_a_nonperiodic.json"), dir);
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "out" / "transformed_coefficients.csv"));
  EXPECT_FALSE(fs::exists(dir / "out" / "phi_initial.bin"));
}

TEST(Transform, LinearFamilyIsAConfigError) {
  const auto dir = scratch();
  EXPECT_EQ(run(out_flag(dir) + "transform " + cfg("linear.json"), dir).code, 1);
}

// classify

TEST(Classify, NamedExamples) {
  const auto dir = scratch();
  auto r = run("classify --beta -2 --gamma -2 --delta 1 --lambda 0", dir);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "ChenLeeLiu\n");
  r = run("classify --beta 1 --gamma 2 --delta 0 --lambda 0", dir);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "Jackiw\n");
  r = run("classify --beta 1 --gamma 1 --delta 1 --lambda 1", dir);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "Generic\n");
}

TEST(Classify, BadInputExitsOne) {
  const auto dir = scratch();
  EXPECT_EQ(run("classify --beta x --gamma 2 --delta 0 --lambda 0", dir).code, 1);
  EXPECT_EQ(run("classify --beta 1e --gamma 2 --delta 0 --lambda 0", dir).code, 1);
  EXPECT_EQ(run("classify --beta nan --gamma 2 --delta 0 --lambda 0", dir).code, 1);
  EXPECT_EQ(run("classify --beta 1 --gamma 2 --delta 0", dir).code, 1);
  EXPECT_EQ(run("", dir).code, 1);
}

// verify

namespace {

double final_max(const fs::path& csv, const std::string& prefix) {
  const auto rows = read_csv(csv);
  double m = 0.0;
  for (std::size_t c = 0; c < rows[0].size(); ++c)
    if (rows[0][c].rfind(prefix, 0) == 0) m = std::max(m, cell(rows.back(), c));
  return m;
}

}  // namespace

TEST(Verify, FamilyAWithQuantizedRamp) {
  const auto dir = scratch();
  const auto r = run(out_flag(dir) + "verify " + cfg("family_a.json"), dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = dir / "out" / "equivalence.csv";
  EXPECT_EQ(read_csv(csv)[0], (std::vector<std::string>{"t", "dens_diff_1", "phase_res_1"}));
  EXPECT_LT(final_max(csv, "dens_diff_"), 1e-6);
  EXPECT_LT(final_max(csv, "phase_res_"), 1e-6);
}

TEST(Verify, FamilyB) {
  const auto dir = scratch();
  const auto r = run(out_flag(dir) + "verify " + cfg("family_b.json"), dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = dir / "out" / "equivalence.csv";
  EXPECT_EQ(read_csv(csv)[0],
            (std::vector<std::string>{"t", "dens_diff_1", "dens_diff_2", "phase_res_1", "phase_res_2"}));
  EXPECT_LT(final_max(csv, "dens_diff_"), 1e-6);
  EXPECT_LT(final_max(csv, "phase_res_"), 1e-6);
}

TEST(Verify, ZeroDeltaSystemsAreIdentical) {
  const auto dir = scratch();
  ASSERT_EQ(run(out_flag(dir) + "verify " + cfg("delta0.json"), dir).code, 0);
  EXPECT_LT(final_max(dir / "out" / "equivalence.csv", "dens_diff_"), 1e-12);
}

TEST(Verify, PerturbedCoefficientExitsTwo) {
  const auto dir = scratch();
  const auto r = run(out_flag(dir) + "verify " + cfg("mismatched.json"), dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_GT(final_max(dir / "out" / "equivalence.csv", "dens_diff_"), 1e-6);
}

TEST(Verify, ToleranceFlagOverridesConfig) {
  const auto dir = scratch();
  EXPECT_EQ(run(out_flag(dir) + "--tolerance 1e-3 verify " + cfg("mismatched.json"), dir).code, 0);
}

TEST(Verify, NonPeriodicRampExitsThree) {
  const auto dir = scratch();
  const auto r = run(out_flag(dir) + "verify " + cfg("family_a_nonperiodic.json"), dir);
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("not periodic"), std::string::npos) << r.err;
}

TEST(Verify, SweepWritesOneRowPerValue) {
  const auto dir = scratch();
  const auto r = run(out_flag(dir) + "verify " + cfg("sweep_family_a.json") + " --sweep nonlinearity.drift.0=2,1,4", dir);
  EXPECT_EQ(r.code, 2);
  const auto rows = read_csv(dir / "out" / "sweep.csv");
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0][0], "axis");
  EXPECT_EQ(rows[1][2], "ok");
  EXPECT_EQ(rows[2][2], "failed");
  EXPECT_EQ(rows[2][3], "3");
  EXPECT_EQ(rows[3][2], "ok");
}

TEST(Verify, SweepOverUnknownKeyExitsOne) {
  const auto dir = scratch();
  EXPECT_EQ(run(out_flag(dir) + "verify " + cfg("sweep_family_a.json") + " --sweep time.dtx=1,2", dir).code, 1);
}

// convergence

namespace {

double observed_order(const fs::path& csv) {
  const auto rows = read_csv(csv);
  EXPECT_EQ(rows.at(0), (std::vector<std::string>{"dt", "steps", "sup_diff", "observed_order"}));
  EXPECT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows.at(1).at(3), "");
  double order = INFINITY;
  for (std::size_t r = 2; r < rows.size(); ++r) order = std::min(order, cell(rows[r], 3));
  return order;
}

}  // namespace

TEST(Convergence, LinearIsFourthOrder) {
  const auto dir = scratch();
  ASSERT_EQ(run(out_flag(dir) + "convergence " + cfg("convergence_linear.json"), dir).code, 0);
  EXPECT_NEAR(observed_order(dir / "out" / "convergence.csv"), 4.0, 0.1);
}

TEST(Convergence, FamilyBBothSystems) {
  const auto dir = scratch();
  ASSERT_EQ(run(out_flag(dir) + "convergence " + cfg("convergence.json"), dir).code, 0);
  EXPECT_GE(observed_order(dir / "out" / "convergence.csv"), 3.5);

  auto doc = read_json_file((kConfigs / "convergence.json").string());
  doc["convergence"] = {{"system", "phi"}};
  const auto path = write_config(dir, "phi.json", doc);
  ASSERT_EQ(run("--output-dir '" + (dir / "phi").string() + "' convergence '" + path.string() + "'", dir).code, 0);
  EXPECT_GE(observed_order(dir / "phi" / "convergence.csv"), 3.5);
}

TEST(Convergence, UnstableStepExitsTwoWithWarning) {
  const auto dir = scratch();
  auto doc = read_json_file((kConfigs / "convergence_linear.json").string());
  doc["time"]["dt"] = 5e-3;
  const auto path = write_config(dir, "unstable.json", doc);
  const auto r = run(out_flag(dir) + "convergence '" + path.string() + "'", dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_NE(r.err.find("stability"), std::string::npos);
}

// --dump-config

TEST(DumpConfig, EveryShippedConfigRoundTrips) {
  const auto dir = scratch();
  int checked = 0;
  for (const auto& e : fs::directory_iterator(kConfigs)) {
    if (e.path().extension() != ".json") continue;
    const auto r = run("--dump-config simulate '" + e.path().string() + "'", dir);
    ASSERT_EQ(r.code, 0) << e.path() << ": " << r.err;
    const auto echoed = parse_config(Json::parse(r.out));
    EXPECT_EQ(echoed, load_config(e.path().string())) << e.path();
    // A second echo is byte-identical.
    EXPECT_EQ(dump_config(echoed), r.out);
    ++checked;
  }
  EXPECT_GE(checked, 10);
}

TEST(DumpConfig, ReflectsGlobalOverrides) {
  const auto dir = scratch();
  const auto r = run("--output-dir elsewhere --tolerance 0.25 --dump-config verify " + cfg("family_a.json"), dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto c = parse_config(Json::parse(r.out));
  EXPECT_EQ(c.output_dir, "elsewhere");
  EXPECT_EQ(c.tolerance, 0.25);
}
