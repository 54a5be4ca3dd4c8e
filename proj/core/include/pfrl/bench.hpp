#ifndef PFRL_BENCH_HPP_
#define PFRL_BENCH_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pfrl/checkpoint.hpp"
#include "pfrl/config.hpp"

namespace pfrl {

struct EvalCell {
  std::string scene;  // catalog name, or the run scene's name
  Variant variant = Variant::kPfOnly;
  double noise = 0.0;  // mm and deg
  int trials = 200;    // per seed
  std::vector<std::uint64_t> seeds = {0};
};

struct SuccessStats {
  int successes = 0;
  int trials = 0;
  double mean_rate = 0.0;  // mean of per-seed rates
  double std_rate = 0.0;   // sample std of per-seed rates; 0 for one seed
  double mean_steps_to_success = 0.0;
  std::vector<double> seed_rates;
  // Steps with no success and no penetration, and how many of them carried a
  // nonzero reward.
  long sparse_checked = 0;
  long sparse_violations = 0;

  bool operator==(const SuccessStats&) const = default;
};

struct EpisodeOutcome {
  bool success = false;
  int steps = 0;
  double total_reward = 0.0;
  double max_penetration = 0.0;
  long sparse_checked = 0;
  long sparse_violations = 0;
  std::vector<TraceRow> trace;
};

// Runs one variant on one scene. Learned variants use the checkpoint's mean
// action (no sampling) and a residual scale of 1.
class EpisodeRunner {
 public:
  EpisodeRunner(const RunConfig& cfg, const SceneSpec& scene, Variant variant,
                const Checkpoint* checkpoint);

  EpisodeOutcome run(std::uint64_t seed, const NoiseLevel& level,
                     bool record_trace) const;
  const EnvConfig& env_config() const { return env_cfg_; }

 private:
  PFConfig pf_;
  Variant variant_;
  EnvConfig env_cfg_;
  std::shared_ptr<const Scene> scene_;
  std::optional<ActorCritic> net_;
  Vector params_;
  double translation_scale_;
  ResidualLimits limits_;
};

// Scene for a cell name: the run scene when the names match, otherwise the
// catalog entry.
SceneSpec resolve_scene(const RunConfig& cfg, const std::string& name);

// Episode seed for trial i of seed s.
std::uint64_t episode_seed(std::uint64_t seed, int trial);

// Throws InvalidSpec for an empty cell and ChecksumMismatch when the
// checkpoint cannot drive the variant.
SuccessStats run_eval(const RunConfig& cfg, const EvalCell& cell,
                      const Checkpoint* checkpoint);

struct CellResult {
  EvalCell cell;
  SuccessStats stats;
};

// "96.25±1.22%"
std::string format_rate(double mean_rate, double std_rate);

// Rows are variants, columns scene x noise.
void emit_table(std::ostream& text, std::ostream& csv,
                const std::vector<CellResult>& results);
std::string results_csv_header();
std::vector<CellResult> parse_results_csv(std::istream& csv);

// Writes up to `n` traces of the cell, named
// trace_<scene>_<variant>_n<noise>_s<seed>_e<trial>_<success|failure>.csv.
std::vector<std::filesystem::path> export_trajectories(
    const RunConfig& cfg, const EvalCell& cell, const Checkpoint* checkpoint,
    int n, const std::filesystem::path& dir);

// PF on a y-z grid of plug positions in the nominal socket frame, goal
// orientation, no noise.
std::string field_csv_header();
void export_field(std::ostream& csv, const SceneSpec& scene,
                  const RunConfig& cfg);

// manifest.json: verb, config hash, seed, version, worker count, the full
// config and checksums of every listed output.
void write_manifest(const std::filesystem::path& dir, const std::string& verb,
                    const RunConfig& cfg, std::uint64_t seed,
                    const std::vector<std::filesystem::path>& outputs,
                    const nlohmann::json& extra = nlohmann::json::object());

std::string library_version();

}  // namespace pfrl

#endif  // PFRL_BENCH_HPP_
