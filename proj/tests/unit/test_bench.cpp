#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pfrl/bench.hpp"
#include "pfrl/errors.hpp"

namespace pfrl {
namespace {

RunConfig base_config() {
  RunConfig cfg = run_config_from_json({{"scene", "easy_cylinder"}});
  cfg.pf.w_rot = 0.5;
  return cfg;
}

EvalCell cell(double noise, int trials, std::vector<std::uint64_t> seeds = {0}) {
  EvalCell c;
  c.scene = "easy_cylinder";
  c.variant = Variant::kPfOnly;
  c.noise = noise;
  c.trials = trials;
  c.seeds = std::move(seeds);
  return c;
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> row;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) row.push_back(f);
    rows.push_back(row);
  }
  return rows;
}

TEST(Bench, PfOnlySucceedsWithoutNoise) {
  const SuccessStats s = run_eval(base_config(), cell(0.0, 40), nullptr);
  EXPECT_EQ(s.trials, 40);
  EXPECT_GE(s.mean_rate, 0.95);
  EXPECT_GT(s.mean_steps_to_success, 0.0);
  EXPECT_GT(s.sparse_checked, 0);
  EXPECT_EQ(s.sparse_violations, 0);
}

TEST(Bench, EvaluationIsDeterministic) {
  const RunConfig cfg = base_config();
  EXPECT_EQ(run_eval(cfg, cell(1.0, 10, {0, 3}), nullptr),
            run_eval(cfg, cell(1.0, 10, {0, 3}), nullptr));
}

TEST(Bench, SeedStatisticsUseSampleStd) {
  const SuccessStats s = run_eval(base_config(), cell(3.0, 10, {0, 1, 2}), nullptr);
  ASSERT_EQ(s.seed_rates.size(), 3u);
  const double m = (s.seed_rates[0] + s.seed_rates[1] + s.seed_rates[2]) / 3.0;
  double ss = 0.0;
  for (double r : s.seed_rates) ss += (r - m) * (r - m);
  EXPECT_NEAR(s.mean_rate, m, 1e-15);
  EXPECT_NEAR(s.std_rate, std::sqrt(ss / 2.0), 1e-15);
  EXPECT_EQ(s.trials, 30);
}

TEST(Bench, InvalidCellsAreRejected) {
  const RunConfig cfg = base_config();
  EXPECT_THROW(run_eval(cfg, cell(0.0, 0), nullptr), InvalidSpec);
  EXPECT_THROW(run_eval(cfg, cell(0.0, 5, {}), nullptr), InvalidSpec);
  EXPECT_THROW(run_eval(cfg, cell(0.0, 5, {1, 1}), nullptr), InvalidSpec);
  EvalCell learned = cell(0.0, 5);
  learned.variant = Variant::kFull;
  EXPECT_THROW(run_eval(cfg, learned, nullptr), InvalidSpec);
}

TEST(Bench, RateFormatting) {
  EXPECT_EQ(format_rate(0.9625, 0.0122), "96.25±1.22%");
  EXPECT_EQ(format_rate(1.0, 0.0), "100.00±0.00%");
}

TEST(Bench, ResultsCsvRoundTrip) {
  CellResult a{cell(0.0, 10, {0, 1}), {}};
  a.stats.successes = 19;
  a.stats.trials = 20;
  a.stats.seed_rates = {1.0, 0.9};
  a.stats.mean_rate = 0.95;
  a.stats.std_rate = std::sqrt(0.005);
  a.stats.mean_steps_to_success = 41.0 / 3.0;
  CellResult b = a;
  b.cell.noise = 5.0;
  b.cell.variant = Variant::kPfLearnedW;
  std::ostringstream text, csv;
  emit_table(text, csv, {a, b});
  EXPECT_NE(text.str().find("95.00±"), std::string::npos);
  std::istringstream in(csv.str());
  const auto back = parse_results_csv(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].stats.mean_rate, a.stats.mean_rate);
  EXPECT_EQ(back[0].stats.std_rate, a.stats.std_rate);
  EXPECT_EQ(back[0].stats.mean_steps_to_success, a.stats.mean_steps_to_success);
  EXPECT_EQ(back[0].cell.seeds, a.cell.seeds);
  EXPECT_EQ(back[1].cell.variant, Variant::kPfLearnedW);
  EXPECT_EQ(back[1].cell.noise, 5.0);
}

TEST(Bench, TraceExportNamesOutcome) {
  const auto dir = std::filesystem::temp_directory_path() / "pfrl_trace_test";
  std::filesystem::remove_all(dir);
  const auto files = export_trajectories(base_config(), cell(0.0, 5), nullptr, 2, dir);
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(files[0].filename().string(),
            "trace_easy_cylinder_pf_only_n0_s0_e0_success.csv");
  std::ifstream is(files[0]);
  std::string header;
  std::getline(is, header);
  EXPECT_EQ(header, trace_csv_header());
  std::filesystem::remove_all(dir);
}

TEST(Bench, FieldAttractionIsMirrorSymmetric) {
  RunConfig cfg = base_config();
  cfg.field.ny = 7;
  cfg.field.nz = 5;
  std::ostringstream os;
  export_field(os, resolve_scene(cfg, "easy_cylinder"), cfg);
  const auto rows = read_csv(os.str());
  ASSERT_EQ(rows.size(), 1u + 35u);
  ASSERT_EQ(rows[0].size(), 21u);
  for (int iz = 0; iz < 5; ++iz) {
    for (int iy = 0; iy < 7; ++iy) {
      const auto& r = rows[1 + iz * 7 + iy];
      const auto& m = rows[1 + iz * 7 + (6 - iy)];
      EXPECT_NEAR(std::stod(r[0]), -std::stod(m[0]), 1e-12);
      EXPECT_NEAR(std::stod(r[4]), -std::stod(m[4]), 1e-9);  // att_dy
      EXPECT_NEAR(std::stod(r[5]), std::stod(m[5]), 1e-9);   // att_dz
      if (iy == 3) EXPECT_NEAR(std::stod(r[4]), 0.0, 1e-9);
    }
  }
}

TEST(Bench, FieldRepulsionVanishesBeyondThreshold) {
  RunConfig cfg = base_config();
  cfg.field.ny = 9;
  cfg.field.nz = 9;
  std::ostringstream os;
  export_field(os, resolve_scene(cfg, "easy_cylinder"), cfg);
  const auto rows = read_csv(os.str());
  int far = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (std::stod(rows[i][2]) <= cfg.pf.repulsive_threshold) continue;
    ++far;
    for (int k = 9; k < 15; ++k) EXPECT_EQ(std::stod(rows[i][k]), 0.0);
  }
  EXPECT_GT(far, 0);
}

TEST(Bench, ManifestListsOutputsWithChecksums) {
  const auto dir = std::filesystem::temp_directory_path() / "pfrl_manifest_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  { std::ofstream(dir / "a.txt") << "hello"; }
  const RunConfig cfg = base_config();
  write_manifest(dir, "eval", cfg, 9, {dir / "a.txt"});
  std::ifstream is(dir / "manifest.json");
  const auto j = nlohmann::json::parse(is);
  EXPECT_EQ(j["verb"], "eval");
  EXPECT_EQ(j["seed"], 9);
  EXPECT_EQ(j["config_hash"], config_hash(cfg));
  EXPECT_EQ(j["outputs"][0]["path"], "a.txt");
  EXPECT_EQ(j["outputs"][0]["fnv1a64"], "a430d84680aabd0b");
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace pfrl
