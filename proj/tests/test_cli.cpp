#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qsir/cli.hpp"

using namespace qsir;
namespace fs = std::filesystem;

namespace {

const std::string kFullDepletion = "b = 0.3\nc = 0.1\nq = 1.1\nt0 = 0.01\nx0 = 0.6\ny0 = 0.4\nz0 = 0\nn_steps = 200\n";
const std::string kPartialDepletion = "b = 0.3\nc = 0.6\nq = 1.1\nt0 = 0.01\nx0 = 0.6\ny0 = 0.4\nz0 = 0\n";

struct Outcome {
  int code;
  std::string out;
  std::string err;

  std::map<std::string, std::string> summary() const {
    std::map<std::string, std::string> m;
    std::istringstream in(out);
    for (std::string line; std::getline(in, line);) {
      const auto eq = line.find('=');
      if (eq != std::string::npos) m[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return m;
  }
};

fs::path dir() {
  const fs::path d = fs::path(::testing::TempDir()) / "qsir_cli";
  fs::create_directories(d);
  return d;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = dir() / name;
  io::write_file_atomic(p, text);
  return p;
}

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "qsir");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::size_t line_count(const fs::path& p) {
  const std::string text = io::read_file(p);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST(Cli, QuantumWritesCsvAndSvg) {
  const fs::path cfg = write_config("full_depletion.cfg", kFullDepletion);
  const fs::path csv = dir() / "quantum.csv", svg = dir() / "quantum.svg";
  fs::remove(csv);
  fs::remove(svg);
  const Outcome r = invoke({"quantum", "--config", cfg.string(), "--out-csv", csv.string(), "--out-svg", svg.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = r.summary();
  EXPECT_EQ(s.at("mode"), "quantum");
  EXPECT_EQ(s.at("records"), "201");
  EXPECT_LE(std::stod(s.at("max_relative_population_drift")), 1e-12);
  EXPECT_EQ(line_count(csv), 202u);
  EXPECT_NE(io::read_file(svg).find("</svg>"), std::string::npos);
}

TEST(Cli, StepsFlagOverridesConfig) {
  const fs::path cfg = write_config("full_depletion.cfg", kFullDepletion);
  const Outcome r = invoke({"exact", "--config", cfg.string(), "--steps", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.summary().at("records"), "11");
}

TEST(Cli, ContinuousReportsClamping) {
  const fs::path cfg = write_config("full_depletion_c.cfg", kFullDepletion + "t_end = 50\ndt = 0.05\n");
  const Outcome r = invoke({"continuous", "--config", cfg.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = r.summary();
  EXPECT_EQ(s.at("t_final"), "50");
  EXPECT_EQ(s.at("clamped"), "0");
}

TEST(Cli, CompareAgreesAndMarksMissingContinuous) {
  const fs::path cfg = write_config("full_depletion.cfg", kFullDepletion);
  const fs::path csv = dir() / "compare.csv";
  const Outcome r = invoke({"compare", "--config", cfg.string(), "--out-csv", csv.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = r.summary();
  EXPECT_LE(std::stod(s.at("max_rel_dev_quantum_exact")), 1e-9);
  const io::CsvTable table = io::read_csv(csv);
  ASSERT_EQ(table.rows.size(), 201u);
  const std::size_t xc = table.column("x_continuous");
  const std::size_t cont = std::stoul(s.at("continuous_records"));
  EXPECT_GT(cont, 1u);
  EXPECT_LT(cont, 201u);
  EXPECT_FALSE(std::isnan(table.rows[cont - 1][xc]));
  EXPECT_TRUE(std::isnan(table.rows[cont][xc]));
  EXPECT_EQ(table.rows[0][table.column("abs_dev_quantum_continuous")], 0.0);
}

TEST(Cli, AnalyzeFullDepletion) {
  const fs::path cfg = write_config("full_depletion.cfg", kFullDepletion);
  const fs::path csv = dir() / "analyze.csv";
  const Outcome r = invoke({"analyze", "--config", cfg.string(), "--out-csv", csv.string(), "--horizon", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = r.summary();
  EXPECT_DOUBLE_EQ(std::stod(s.at("R0")), 3.0);
  EXPECT_EQ(s.at("class"), "DiseaseFree_FullDepletion");
  EXPECT_EQ(s.at("xi_decreasing"), "true");
  EXPECT_EQ(s.at("alpha_converged"), "true");
  EXPECT_LT(std::stod(s.at("alpha")), 1e-8);
  EXPECT_EQ(line_count(csv), 101u);
}

TEST(Cli, AnalyzePartialDepletion) {
  const fs::path cfg = write_config("partial_depletion.cfg", kPartialDepletion);
  const Outcome r = invoke({"analyze", "--config", cfg.string(), "--tol", "1e-8"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = r.summary();
  EXPECT_EQ(s.at("class"), "DiseaseFree_PartialDepletion");
  EXPECT_EQ(s.at("xi_above_one"), "true");
  EXPECT_NEAR(std::stod(s.at("alpha")), 0.31862069046432791385, 1e-7);
}

TEST(Cli, AnalyzeWithoutInfected) {
  const fs::path cfg = write_config("noinf.cfg", "b=0.3\nc=0.1\nq=1.1\nt0=0.01\nx0=0.6\ny0=0\nz0=0.4\n");
  const Outcome r = invoke({"analyze", "--config", cfg.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.summary().at("alpha"), "0.6");
}

TEST(Cli, SweepDecreasing) {
  const fs::path cfg = write_config("q_sweep.cfg", kPartialDepletion + "q_list = 1.1, 1.5, 2.0\n");
  const fs::path csv = dir() / "sweep.csv", svg = dir() / "sweep.svg";
  const Outcome r = invoke({"sweep", "--config", cfg.string(), "--out-csv", csv.string(), "--out-svg", svg.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.summary().at("alpha_strictly_decreasing"), "true");
  const io::CsvTable table = io::read_csv(csv);
  ASSERT_EQ(table.rows.size(), 3u);
  EXPECT_EQ(table.rows[2][0], 2.0);
}

TEST(Cli, Deterministic) {
  const fs::path cfg = write_config("full_depletion.cfg", kFullDepletion);
  const fs::path a = dir() / "det_a.csv", b = dir() / "det_b.csv";
  const Outcome ra = invoke({"compare", "--config", cfg.string(), "--out-csv", a.string()});
  const Outcome rb = invoke({"compare", "--config", cfg.string(), "--out-csv", b.string()});
  ASSERT_EQ(ra.code, 0);
  EXPECT_EQ(ra.out, rb.out);
  EXPECT_EQ(io::read_file(a), io::read_file(b));
}

TEST(Cli, ConfigErrorsExitTwo) {
  const fs::path bad_q = write_config("badq.cfg", "b=0.3\nc=0.1\nq=1.0\nt0=0.01\nx0=0.6\ny0=0.4\n");
  Outcome r = invoke({"quantum", "--config", bad_q.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("q must exceed 1"), std::string::npos);

  const fs::path missing = write_config("missing.cfg", "b=0.3\nq=1.1\nt0=0.01\nx0=0.6\ny0=0.4\n");
  r = invoke({"quantum", "--config", missing.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("'c'"), std::string::npos);

  EXPECT_EQ(invoke({"bogus", "--config", bad_q.string()}).code, 2);
  EXPECT_EQ(invoke({"quantum"}).code, 2);
  EXPECT_EQ(invoke({"sweep", "--config", write_config("full_depletion.cfg", kFullDepletion).string()}).code, 2);
}

TEST(Cli, IoErrorsExitFour) {
  EXPECT_EQ(invoke({"quantum", "--config", (dir() / "does_not_exist.cfg").string()}).code, 4);
  const fs::path cfg = write_config("full_depletion.cfg", kFullDepletion);
  const Outcome r = invoke({"quantum", "--config", cfg.string(), "--out-csv", "/nonexistent_dir_qsir/x.csv"});
  EXPECT_EQ(r.code, 4);
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, NumericFailureExitsThree) {
  // Grid time overflows after about a thousand doublings.
  const fs::path cfg = write_config("overflow.cfg", "b=0.3\nc=0.1\nq=2\nt0=1\nx0=0.6\ny0=0.4\nn_steps=2000\n");
  const Outcome r = invoke({"quantum", "--config", cfg.string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("at index"), std::string::npos);
}

TEST(Cli, HelpExitsZero) {
  const Outcome r = invoke({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("--config"), std::string::npos);
}
