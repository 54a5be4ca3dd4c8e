#include "pfrl_cli/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pfrl/bench.hpp"
#include "pfrl/checkpoint.hpp"
#include "pfrl/config.hpp"
#include "pfrl/errors.hpp"
#include "pfrl/trainer.hpp"
#include "pfrl/util.hpp"

namespace pfrl::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::string variant;
  std::string checkpoint;
  std::optional<double> noise;
  int episode = 0;
};

RunConfig load(const Options& o) {
  return o.config.empty() ? run_config_from_json(nlohmann::json::object())
                          : load_run_config(o.config);
}

std::optional<Checkpoint> maybe_checkpoint(const Options& o) {
  if (o.checkpoint.empty()) return std::nullopt;
  return load_checkpoint(o.checkpoint);
}

void require_checkpoint(const std::optional<Checkpoint>& ck, Variant v) {
  if (variant_learns(v) && !ck) {
    throw ConfigError("variant '" + std::string(variant_name(v)) +
                      "' needs --checkpoint");
  }
}

std::string cell_dir_name(const EvalCell& c, const std::string& scene) {
  std::string noise = format_double(c.noise);
  for (char& ch : noise) {
    if (ch == '.') ch = 'p';
  }
  return "cell_" + scene + "_" + std::string(variant_name(c.variant)) + "_n" +
         noise;
}

fs::path write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os << text;
  if (!os) throw Error("failed writing " + path.string());
  return path;
}

int cmd_train(const Options& o, std::ostream& out) {
  RunConfig cfg = load(o);
  if (!o.variant.empty()) cfg.train.variant = parse_variant(o.variant);
  const std::uint64_t seed = o.seed.value_or(0);
  const fs::path dir(o.out);
  fs::create_directories(dir);

  const fs::path log_path = dir / "train_log.csv";
  std::ofstream log(log_path, std::ios::binary);
  if (!log) throw Error("cannot write " + log_path.string());
  log << train_log_header() << '\n';

  TrainHooks hooks;
  hooks.on_iteration = [&](const TrainLogRow& row) {
    write_train_log_row(log, row);
    log.flush();
    out << "iteration " << row.iteration << " steps " << row.env_steps
        << " noise " << format_double(row.noise_mm) << " success "
        << format_double(row.success_rate) << '\n';
  };
  hooks.on_checkpoint = [&](const Checkpoint& ck, int iteration) {
    save_checkpoint(dir / ("checkpoint_" + std::to_string(iteration) + ".pfrl"),
                    ck);
  };

  std::vector<fs::path> outputs{log_path};
  nlohmann::json extra;
  try {
    const TrainResult r = train(cfg, seed, hooks);
    log.close();
    extra = {{"variant", variant_name(cfg.train.variant)},
             {"iterations", r.iterations},
             {"env_steps", r.env_steps},
             {"final_noise_mm", r.curriculum.n},
             {"train_log_fnv1a64", hex64(file_checksum(log_path))}};
    if (variant_learns(cfg.train.variant)) {
      const fs::path ck = dir / "checkpoint.pfrl";
      save_checkpoint(ck, r.checkpoint);
      outputs.push_back(ck);
    } else {
      out << "variant pf_only has no parameters; nothing to train\n";
    }
  } catch (const NonFiniteLoss&) {
    log.close();
    write_manifest(dir, "train", cfg, seed, outputs,
                   {{"aborted", "non-finite loss"}});
    throw;
  }
  write_manifest(dir, "train", cfg, seed, outputs, extra);
  return kOk;
}

std::vector<EvalCell> cells_for(const RunConfig& cfg,
                                const std::vector<Variant>& variants) {
  std::vector<std::string> scenes = cfg.eval.scenes;
  if (scenes.empty()) scenes.push_back(cfg.scene.name);
  std::vector<EvalCell> cells;
  for (const auto& scene : scenes) {
    for (Variant v : variants) {
      for (double n : cfg.eval.noise_levels) {
        EvalCell c;
        c.scene = scene;
        c.variant = v;
        c.noise = n;
        c.trials = cfg.eval.trials;
        c.seeds = cfg.eval.seeds;
        cells.push_back(c);
      }
    }
  }
  return cells;
}

int cmd_eval(const Options& o, std::ostream& out, bool sweep) {
  RunConfig cfg = load(o);
  if (o.seed) cfg.eval.seeds = {*o.seed};
  std::vector<Variant> variants = cfg.eval.variants;
  if (!o.variant.empty()) variants = {parse_variant(o.variant)};
  if (variants.empty()) throw ConfigError("no variants to evaluate");
  const std::optional<Checkpoint> ck = maybe_checkpoint(o);
  for (Variant v : variants) {
    require_checkpoint(ck, v);
    if (variant_learns(v)) require_compatible(*ck, v);
  }
  if (cfg.eval.trials <= 0) throw InvalidSpec("eval.trials must be > 0");

  const fs::path dir(o.out);
  fs::create_directories(dir);
  std::vector<CellResult> results;
  std::vector<fs::path> outputs;
  for (const EvalCell& cell : cells_for(cfg, variants)) {
    const Checkpoint* ckp = ck ? &*ck : nullptr;
    const SuccessStats stats = run_eval(cfg, cell, ckp);
    const std::string scene = resolve_scene(cfg, cell.scene).name;
    EvalCell named = cell;
    named.scene = scene;
    results.push_back({named, stats});
    out << scene << ' ' << variant_name(cell.variant) << " noise "
        << format_double(cell.noise) << ": "
        << format_rate(stats.mean_rate, stats.std_rate) << '\n';

    const fs::path cell_dir = sweep ? dir / cell_dir_name(cell, scene) : dir;
    std::vector<fs::path> cell_outputs;
    if (cfg.eval.export_traces > 0) {
      cell_outputs = export_trajectories(cfg, cell, ckp, cfg.eval.export_traces,
                                         cell_dir / "traces");
    }
    if (sweep) {
      fs::create_directories(cell_dir);
      std::ostringstream text, csv;
      emit_table(text, csv, {results.back()});
      cell_outputs.push_back(write_text(cell_dir / "results.csv", csv.str()));
      write_manifest(cell_dir, "sweep-cell", cfg, cell.seeds.front(),
                     cell_outputs,
                     {{"scene", scene},
                      {"variant", variant_name(cell.variant)},
                      {"noise", cell.noise},
                      {"seeds", cell.seeds}});
    }
    outputs.insert(outputs.end(), cell_outputs.begin(), cell_outputs.end());
  }

  std::ostringstream text, csv;
  emit_table(text, csv, results);
  out << text.str();
  outputs.push_back(write_text(dir / "table.txt", text.str()));
  outputs.push_back(write_text(dir / "results.csv", csv.str()));
  nlohmann::json extra = {{"cells", results.size()}};
  if (ck) extra["checkpoint"] = o.checkpoint;
  write_manifest(dir, sweep ? "sweep" : "eval", cfg, cfg.eval.seeds.front(),
                 outputs, extra);
  return kOk;
}

int cmd_field(const Options& o, std::ostream& out) {
  const RunConfig cfg = load(o);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  std::ostringstream csv;
  export_field(csv, cfg.scene, cfg);
  const fs::path path = write_text(dir / "field.csv", csv.str());
  write_manifest(dir, "field-dump", cfg, o.seed.value_or(0), {path},
                 {{"scene", cfg.scene.name}});
  out << "wrote " << path.string() << '\n';
  return kOk;
}

int cmd_replay(const Options& o, std::ostream& out) {
  const RunConfig cfg = load(o);
  const Variant variant = o.variant.empty() ? cfg.train.variant
                                            : parse_variant(o.variant);
  const std::optional<Checkpoint> ck = maybe_checkpoint(o);
  require_checkpoint(ck, variant);
  if (o.episode < 0) throw ConfigError("--episode must be >= 0");
  const std::uint64_t seed = o.seed.value_or(0);
  const double noise = o.noise.value_or(
      cfg.eval.noise_levels.empty() ? 0.0 : cfg.eval.noise_levels.front());
  if (noise < 0.0) throw ConfigError("--noise must be >= 0");

  const EpisodeRunner runner(cfg, cfg.scene, variant, ck ? &*ck : nullptr);
  const EpisodeOutcome o2 =
      runner.run(episode_seed(seed, o.episode),
                 NoiseLevel::FromPlugLevel(noise, runner.env_config()), true);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  const fs::path path = dir / "trace.csv";
  {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path.string());
    write_trace_csv(os, o2.trace);
  }
  write_manifest(dir, "replay", cfg, seed, {path},
                 {{"variant", variant_name(variant)},
                  {"episode", o.episode},
                  {"noise", noise},
                  {"success", o2.success},
                  {"steps", o2.steps}});
  out << (o2.success ? "success" : "failure") << " after " << o2.steps
      << " steps\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Potential-field + residual RL insertion experiments", "pfrl"};
  app.require_subcommand(1);
  Options o;

  const auto common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON run configuration")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "Base seed");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--variant", o.variant,
                    "pf_only | pf_residual_no_curriculum | pf_plus_learned_w | "
                    "pf_residual_learned_beta | full");
    sub->add_option("--checkpoint", o.checkpoint, "Trained checkpoint")
        ->check(CLI::ExistingFile);
  };
  CLI::App* train_cmd = app.add_subcommand("train", "Train a variant");
  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate variants");
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Evaluate every cell with per-cell outputs");
  CLI::App* field_cmd =
      app.add_subcommand("field-dump", "Sample the PF over a y-z grid");
  CLI::App* replay_cmd =
      app.add_subcommand("replay", "Re-run one episode and write its trace");
  for (CLI::App* sub : {train_cmd, eval_cmd, sweep_cmd, field_cmd, replay_cmd}) {
    common(sub);
  }
  replay_cmd->add_option("--noise", o.noise, "Noise level, mm and deg");
  replay_cmd->add_option("--episode", o.episode, "Episode index");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "pfrl: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (*train_cmd) return cmd_train(o, out);
    if (*eval_cmd) return cmd_eval(o, out, false);
    if (*sweep_cmd) return cmd_eval(o, out, true);
    if (*field_cmd) return cmd_field(o, out);
    if (*replay_cmd) return cmd_replay(o, out);
  } catch (const ConfigError& e) {
    err << "pfrl: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const UnknownVariant& e) {
    err << "pfrl: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidSpec& e) {
    err << "pfrl: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "pfrl: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kConfigError;
}

}  // namespace pfrl::cli
