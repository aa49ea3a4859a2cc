#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "imdyn/errors.hpp"
#include "imdyn/schedule.hpp"
#include "imdyn/tools/commands.hpp"
#include "imdyn/tools/experiment.hpp"

namespace imdyn::tools {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("imdyn_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_config(const json& j, const std::string& name = "config.json") {
    const fs::path p = dir_ / name;
    std::ofstream(p) << j.dump(2);
    return p.string();
  }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    args.insert(args.begin(), "imdyn");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  static json figure1_json(double n) {
    return {{"objective", "l1"}, {"alpha", 9}, {"l", 1}, {"beta0", 1}, {"m", 0}, {"n", n}, {"b0", "auto"}};
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST(Config, ParsesAndResolvesAutoB0) {
  const ExperimentConfig c = parse_config(json{{"alpha", 9}, {"l", 1}, {"m", 0}, {"n", 4}});
  EXPECT_FALSE(c.b0.has_value());
  const SystemConfig sys = to_system(c);
  EXPECT_DOUBLE_EQ(sys.schedule.b0, 4.5);
  EXPECT_EQ(sys.x0[0], 10.0);
  EXPECT_EQ(sys.u0[0], 0.0);
}

TEST(Config, ClampsAutoB0) {
  const ExperimentConfig c = parse_config(json{{"alpha", 13}, {"l", 1}, {"m", 12}, {"n", 9}});
  EXPECT_EQ(to_system(c).schedule.b0, 1.0);
}

TEST(Config, FieldLevelErrors) {
  auto message = [](const json& j) {
    try {
      to_system(parse_config(j));
    } catch (const InvalidInput& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  json base = {{"alpha", 9}, {"l", 1}, {"m", 0}, {"n", 4}};
  EXPECT_EQ(message(base), "");
  json typo = base;
  typo["aplha"] = 9;
  EXPECT_NE(message(typo).find("aplha"), std::string::npos);
  json wrong = base;
  wrong["t_end"] = "long";
  EXPECT_NE(message(wrong).find("t_end"), std::string::npos);
  json missing = base;
  missing.erase("n");
  EXPECT_NE(message(missing).find("n:"), std::string::npos);
  json early = base;
  early["t_end"] = 1.0;
  EXPECT_NE(message(early).find("t_end"), std::string::npos);
  json dims = base;
  dims["x0"] = {1.0, 2.0};
  // The dimension comes from x0, so the one-coordinate u0 is the odd one out.
  EXPECT_NE(message(dims).find("u0"), std::string::npos);
  json kind = base;
  kind["objective"] = "huber";
  EXPECT_NE(message(kind).find("objective"), std::string::npos);
  json samples = base;
  samples["sample_count"] = 2.5;
  EXPECT_NE(message(samples).find("sample_count"), std::string::npos);
}

TEST(Config, JsonRoundTrip) {
  ExperimentConfig c = parse_config(json{{"alpha", 9}, {"l", 1}, {"m", 0}, {"n", 4}});
  c.objective = "diag_quadratic";
  c.weights = {1.0, 0.0};
  c.center = {2.0, -1.0};
  c.x0 = {1.0, 2.0};
  c.u0 = {0.5, 0.0};
  c.b0 = 3.25;
  EXPECT_EQ(parse_config(to_json(c)), c);
  EXPECT_TRUE(same_system(to_system(c), to_system(parse_config(to_json(c)))));
}

TEST(Csv, ColumnsAndPrecision) {
  const auto cols = csv_columns(2);
  const std::vector<std::string> expected = {
      "t", "x_0", "x_1", "v_0", "v_1", "envelope_gap", "grad_norm", "prox_dist", "prox_gap",
      "velocity_norm", "energy_c_alpha_minus_1", "dist_to_minimizer", "t2b_times_gap"};
  EXPECT_EQ(cols, expected);
  Trajectory traj;
  Sample s;
  s.t = 1.0 / 3.0;
  s.x = Vector::Constant(1, 0.1);
  s.v = Vector::Zero(1);
  traj.samples.push_back(s);
  std::ostringstream out;
  write_csv(out, traj);
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header.rfind("t,x_0,v_0,envelope_gap", 0), 0u);
  const std::string first = row.substr(0, row.find(','));
  EXPECT_EQ(std::stod(first), 1.0 / 3.0);
  EXPECT_EQ(first, "3.3333333333333331e-01");
}

TEST_F(CliTest, SimulateWritesCsvAndSummary) {
  json j = figure1_json(4.0);
  j["sample_count"] = 300;
  const std::string cfg = write_config(j);
  const fs::path csv = dir_ / "run.csv";
  ASSERT_EQ(run({"simulate", "--config", cfg, "--out", csv.string()}), exit_ok) << err_.str();
  std::ifstream in(csv);
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, 301);
  EXPECT_NE(out_.str().find("envelope_gap"), std::string::npos);
  EXPECT_NE(out_.str().find("conditions      pass"), std::string::npos);
}

TEST_F(CliTest, FlagsOverrideConfig) {
  const std::string cfg = write_config(figure1_json(2.0));
  const fs::path csv = dir_ / "short.csv";
  ASSERT_EQ(run({"simulate", "--config", cfg, "--out", csv.string(), "--t-end", "5", "--samples",
                 "50", "--rel-tol", "1e-9", "--abs-tol", "1e-18"}),
            exit_ok);
  std::ifstream in(csv);
  std::string line, last;
  int lines = 0;
  while (std::getline(in, line)) {
    last = line;
    ++lines;
  }
  EXPECT_EQ(lines, 51);
  EXPECT_EQ(std::stod(last.substr(0, last.find(','))), 5.0);
}

TEST_F(CliTest, SimulateIsDeterministic) {
  const std::string cfg = write_config(figure1_json(2.0));
  const fs::path a = dir_ / "a.csv", b = dir_ / "b.csv";
  ASSERT_EQ(run({"simulate", "--config", cfg, "--out", a.string()}), exit_ok);
  ASSERT_EQ(run({"simulate", "--config", cfg, "--out", b.string()}), exit_ok);
  const std::string sa = slurp(a);
  EXPECT_FALSE(sa.empty());
  EXPECT_EQ(sa, slurp(b));
}

TEST_F(CliTest, InvalidConfigExitsOne) {
  json j = figure1_json(4.0);
  j["t_end"] = 0.5;
  EXPECT_EQ(run({"simulate", "--config", write_config(j)}), exit_invalid);
  EXPECT_NE(err_.str().find("t_end"), std::string::npos);
  j = figure1_json(4.0);
  j["colour"] = "red";
  EXPECT_EQ(run({"check", "--config", write_config(j)}), exit_invalid);
  EXPECT_NE(err_.str().find("colour"), std::string::npos);
  EXPECT_EQ(run({"simulate", "--config", (dir_ / "nope.json").string()}), exit_invalid);
  EXPECT_EQ(run({"simulate"}), exit_invalid);
  EXPECT_EQ(run({"bogus"}), exit_invalid);
}

TEST_F(CliTest, CheckVerdicts) {
  EXPECT_EQ(run({"check", "--config", write_config(figure1_json(4.0))}), exit_ok);
  EXPECT_NE(out_.str().find("epsilon"), std::string::npos);
  EXPECT_NE(out_.str().find("--- json"), std::string::npos);
  const json parsed = json::parse(out_.str().substr(out_.str().find("--- json") + 9));
  EXPECT_TRUE(parsed["overall"].get<bool>());
  EXPECT_TRUE(parsed["epsilon_witness"].is_number());

  json fig4a = {{"objective", "elastic_abs"}, {"alpha", 13}, {"l", 1}, {"m", 12}, {"n", 9}};
  EXPECT_EQ(run({"check", "--config", write_config(fig4a)}), exit_conditions_fail);
  EXPECT_NE(out_.str().find("m <= n+1 violated"), std::string::npos);
  EXPECT_NE(out_.str().find("2m < n+l violated"), std::string::npos);

  json setting1 = {{"alpha", 9}, {"beta0", 0}, {"l", 1}, {"m", 0}, {"n", 5}, {"b0", 1}};
  EXPECT_EQ(run({"check", "--config", write_config(setting1)}), exit_ok);
  EXPECT_NE(out_.str().find("Setting1"), std::string::npos);
}

TEST_F(CliTest, RatesWritesCsvOnlyOnRequest) {
  const std::string cfg = write_config(figure1_json(2.0));
  const fs::path old = fs::current_path();
  fs::current_path(dir_);
  const int code = run({"rates", "--config", cfg});
  fs::current_path(old);
  EXPECT_EQ(code, exit_ok);
  EXPECT_FALSE(fs::exists(dir_ / "trajectory.csv"));
  EXPECT_NE(out_.str().find("velocity_norm"), std::string::npos);
  ASSERT_EQ(run({"rates", "--config", cfg, "--out", (dir_ / "r.csv").string()}), exit_ok);
  EXPECT_TRUE(fs::exists(dir_ / "r.csv"));
}

TEST_F(CliTest, FigureOneSweep) {
  ASSERT_EQ(run({"figure", "1", "--out", dir_.string(), "--samples", "200"}), exit_ok) << err_.str();
  int csvs = 0;
  for (const auto& e : fs::directory_iterator(dir_)) csvs += e.path().extension() == ".csv";
  EXPECT_EQ(csvs, 6);
  EXPECT_TRUE(fs::exists(dir_ / "figure1_n=4.99.csv"));
  const json manifest = json::parse(slurp(dir_ / "manifest.json"));
  ASSERT_EQ(manifest["curves"].size(), 6u);
  EXPECT_EQ(manifest["subfigures"]["b"], "envelope_gap");
  for (const auto& curve : manifest["curves"]) EXPECT_FALSE(curve["diverging"].get<bool>());

  // Round trip: every stored member config re-validates to the preset's system.
  const auto preset = figure_preset("1");
  ASSERT_TRUE(preset.has_value());
  for (const auto& member : preset->members) {
    ExperimentConfig stored = load_config((dir_ / ("figure1_" + member.label + ".json")).string());
    ExperimentConfig expected = member.config;
    expected.sample_count = 200;
    EXPECT_TRUE(same_system(to_system(stored), to_system(expected))) << member.label;
  }
}

TEST_F(CliTest, FigureFourBDiverges) {
  ASSERT_EQ(run({"figure", "4b", "--out", dir_.string()}), exit_ok);
  const json manifest = json::parse(slurp(dir_ / "manifest.json"));
  ASSERT_EQ(manifest["curves"].size(), 1u);
  EXPECT_TRUE(manifest["curves"][0]["diverging"].get<bool>());
  EXPECT_TRUE(fs::exists(dir_ / manifest["curves"][0]["csv"].get<std::string>()));
}

TEST_F(CliTest, FigureFourASimulate) {
  const auto preset = figure_preset("4a");
  ASSERT_TRUE(preset.has_value());
  ExperimentConfig c = preset->members.front().config;
  const fs::path csv = dir_ / "4a.csv";
  const int code = run({"simulate", "--config", write_config(to_json(c)), "--out", csv.string()});
  EXPECT_TRUE(code == exit_ok || code == exit_divergence);
  EXPECT_TRUE(fs::exists(csv));
  EXPECT_NE(out_.str().find("conditions      FAIL"), std::string::npos);
}

TEST_F(CliTest, UnknownFigure) {
  EXPECT_EQ(run({"figure", "5", "--out", dir_.string()}), exit_invalid);
  EXPECT_FALSE(figure_preset("5").has_value());
}

TEST(Presets, SweepsMatchCaptions) {
  const std::vector<std::pair<std::string, std::size_t>> sizes = {
      {"1", 6}, {"2", 3}, {"3", 4}, {"4a", 1}, {"4b", 1}};
  for (const auto& [id, count] : sizes) {
    const auto p = figure_preset(id);
    ASSERT_TRUE(p.has_value()) << id;
    EXPECT_EQ(p->members.size(), count) << id;
    for (const auto& m : p->members) {
      EXPECT_EQ(m.config.output, "figure" + id + "_" + m.label + ".csv");
      EXPECT_FALSE(m.config.b0.has_value());
    }
  }
  EXPECT_TRUE(figure_preset("4a")->expect_divergence);
  EXPECT_EQ(figure_preset("3")->members.front().config.objective, "elastic_abs");
}

}  // namespace
}  // namespace imdyn::tools
