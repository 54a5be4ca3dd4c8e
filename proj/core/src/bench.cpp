#include "pfrl/bench.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "pfrl/errors.hpp"
#include "pfrl/util.hpp"

#ifndef PFRL_VERSION
#define PFRL_VERSION "unknown"
#endif

namespace pfrl {
namespace {

std::string noise_tag(double n) {
  std::string s = format_double(n);
  for (char& ch : s) {
    if (ch == '.') ch = 'p';
  }
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

std::string join_seeds(const std::vector<std::uint64_t>& seeds) {
  std::string s;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(seeds[i]);
  }
  return s;
}

}  // namespace

std::string library_version() { return PFRL_VERSION; }

SceneSpec resolve_scene(const RunConfig& cfg, const std::string& name) {
  if (name.empty() || name == cfg.scene.name) return cfg.scene;
  return catalog_scene(name);
}

std::uint64_t episode_seed(std::uint64_t seed, int trial) {
  return derive_seed(seed, 20, static_cast<std::uint64_t>(trial));
}

EpisodeRunner::EpisodeRunner(const RunConfig& cfg, const SceneSpec& scene,
                             Variant variant, const Checkpoint* checkpoint)
    : pf_(cfg.pf),
      variant_(variant),
      env_cfg_(cfg.env),
      scene_(std::make_shared<const Scene>(scene, cfg.sample_count)),
      translation_scale_(cfg.translation_scale),
      limits_(cfg.limits) {
  if (scene.name != cfg.scene.name) {
    env_cfg_.success_tr = std::min(env_cfg_.success_tr, 0.5 * scene.tolerance);
  }
  env_cfg_.validate(scene);
  if (variant_learns(variant)) {
    if (checkpoint == nullptr) {
      throw InvalidSpec("variant '" + std::string(variant_name(variant)) +
                        "' needs a checkpoint");
    }
    require_compatible(*checkpoint, variant);
    net_.emplace(checkpoint->actor, checkpoint->critic);
    params_ = checkpoint->params;
    translation_scale_ = checkpoint->translation_scale;
    limits_ = checkpoint->limits;
  }
}

EpisodeOutcome EpisodeRunner::run(std::uint64_t seed, const NoiseLevel& level,
                                  bool record_trace) const {
  InsertionEnv env(scene_, env_cfg_);
  Observation obs = env.reset(level, seed);
  HiddenState hidden;
  if (net_) hidden = net_->zero_hidden(1);
  Vector u;
  if (!net_) u = Vector::Zero(0);

  EpisodeOutcome out;
  if (record_trace) {
    TraceRow row;
    row.true_plug = env.state().plug;
    row.observed_plug = obs.plug;
    row.penetration = env.state().penetration;
    out.trace.push_back(row);
  }
  while (true) {
    if (net_) {
      const Matrix x = encode_actor_obs(obs, translation_scale_);
      u = net_->actor_step(params_, x, hidden).col(0);
    }
    const PFBreakdown pf =
        pf_action_breakdown(*scene_, obs.plug, obs.socket, pf_);
    const ComposedAction act =
        compose_action(variant_, pf, u, 1.0, pf_, limits_, env_cfg_);
    const StepResult r = env.step(act.total, level);

    ++out.steps;
    out.total_reward += r.reward;
    out.max_penetration = std::max(out.max_penetration, r.penetration);
    if (!r.success && r.penetration == 0.0) {
      ++out.sparse_checked;
      if (r.reward != 0.0) ++out.sparse_violations;
    }
    if (record_trace) {
      TraceRow row;
      row.step = out.steps;
      row.true_plug = env.state().plug;
      row.observed_plug = r.obs.plug;
      row.a_pf = act.pf;
      row.a_rl = act.rl;
      row.a_total = r.applied;
      row.reward = r.reward;
      row.penetration = r.penetration;
      row.done = r.done;
      out.trace.push_back(row);
    }
    obs = r.obs;
    if (r.done) {
      out.success = r.success;
      break;
    }
  }
  return out;
}

SuccessStats run_eval(const RunConfig& cfg, const EvalCell& cell,
                      const Checkpoint* checkpoint) {
  if (cell.trials <= 0) throw InvalidSpec("eval cell has no trials");
  if (cell.seeds.empty()) throw InvalidSpec("eval cell has no seeds");
  if (std::set<std::uint64_t>(cell.seeds.begin(), cell.seeds.end()).size() !=
      cell.seeds.size()) {
    throw InvalidSpec("eval seeds must be distinct");
  }
  if (!(cell.noise >= 0.0)) throw InvalidSpec("eval noise must be >= 0");
  const EpisodeRunner runner(cfg, resolve_scene(cfg, cell.scene), cell.variant,
                             checkpoint);
  const NoiseLevel level =
      NoiseLevel::FromPlugLevel(cell.noise, runner.env_config());

  SuccessStats stats;
  long success_steps = 0;
  for (std::uint64_t seed : cell.seeds) {
    int wins = 0;
    for (int i = 0; i < cell.trials; ++i) {
      const EpisodeOutcome o = runner.run(episode_seed(seed, i), level, false);
      stats.sparse_checked += o.sparse_checked;
      stats.sparse_violations += o.sparse_violations;
      if (o.success) {
        ++wins;
        success_steps += o.steps;
      }
    }
    stats.successes += wins;
    stats.trials += cell.trials;
    stats.seed_rates.push_back(static_cast<double>(wins) / cell.trials);
  }
  const double k = static_cast<double>(stats.seed_rates.size());
  double sum = 0.0;
  for (double r : stats.seed_rates) sum += r;
  stats.mean_rate = sum / k;
  if (stats.seed_rates.size() > 1) {
    double ss = 0.0;
    for (double r : stats.seed_rates) {
      ss += (r - stats.mean_rate) * (r - stats.mean_rate);
    }
    stats.std_rate = std::sqrt(ss / (k - 1.0));
  }
  if (stats.successes > 0) {
    stats.mean_steps_to_success =
        static_cast<double>(success_steps) / stats.successes;
  }
  return stats;
}

std::string format_rate(double mean_rate, double std_rate) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f±%.2f%%", 100.0 * mean_rate,
                100.0 * std_rate);
  return buf;
}

std::string results_csv_header() {
  return "scene,variant,noise,trials_per_seed,seeds,successes,trials,"
         "mean_rate,std_rate,mean_steps_to_success,seed_rates";
}

void emit_table(std::ostream& text, std::ostream& csv,
                const std::vector<CellResult>& results) {
  std::vector<std::pair<std::string, double>> columns;
  std::vector<Variant> rows;
  std::map<std::pair<int, std::size_t>, const CellResult*> cells;
  for (const CellResult& r : results) {
    const std::pair<std::string, double> col{r.cell.scene, r.cell.noise};
    auto cit = std::find(columns.begin(), columns.end(), col);
    if (cit == columns.end()) cit = columns.insert(columns.end(), col);
    auto rit = std::find(rows.begin(), rows.end(), r.cell.variant);
    if (rit == rows.end()) rit = rows.insert(rows.end(), r.cell.variant);
    cells[{static_cast<int>(rit - rows.begin()),
           static_cast<std::size_t>(cit - columns.begin())}] = &r;
  }

  text << "variant";
  for (const auto& [scene, noise] : columns) {
    text << " | " << scene << " " << format_double(noise) << "mm/"
         << format_double(noise) << "deg";
  }
  text << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    text << variant_name(rows[i]);
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const auto it = cells.find({static_cast<int>(i), c});
      text << " | ";
      if (it == cells.end()) {
        text << "-";
      } else {
        text << format_rate(it->second->stats.mean_rate,
                            it->second->stats.std_rate);
      }
    }
    text << '\n';
  }

  csv << results_csv_header() << '\n';
  for (const CellResult& r : results) {
    const SuccessStats& s = r.stats;
    csv << r.cell.scene << ',' << variant_name(r.cell.variant) << ','
        << format_double(r.cell.noise) << ',' << r.cell.trials << ','
        << join_seeds(r.cell.seeds) << ',' << s.successes << ',' << s.trials
        << ',' << format_double(s.mean_rate) << ','
        << format_double(s.std_rate) << ','
        << format_double(s.mean_steps_to_success) << ',';
    for (std::size_t i = 0; i < s.seed_rates.size(); ++i) {
      if (i) csv << ' ';
      csv << format_double(s.seed_rates[i]);
    }
    csv << '\n';
  }
}

std::vector<CellResult> parse_results_csv(std::istream& csv) {
  std::string line;
  if (!std::getline(csv, line) || line != results_csv_header()) {
    throw InvalidSpec("results CSV: unexpected header");
  }
  std::vector<CellResult> out;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv(line);
    if (f.size() < 10) throw InvalidSpec("results CSV: short row");
    CellResult r;
    r.cell.scene = f[0];
    r.cell.variant = parse_variant(f[1]);
    r.cell.noise = std::stod(f[2]);
    r.cell.trials = std::stoi(f[3]);
    r.cell.seeds.clear();
    std::stringstream seeds(f[4]);
    for (std::uint64_t s; seeds >> s;) r.cell.seeds.push_back(s);
    r.stats.successes = std::stoi(f[5]);
    r.stats.trials = std::stoi(f[6]);
    r.stats.mean_rate = std::stod(f[7]);
    r.stats.std_rate = std::stod(f[8]);
    r.stats.mean_steps_to_success = std::stod(f[9]);
    if (f.size() > 10) {
      std::stringstream rates(f[10]);
      for (std::string v; rates >> v;) r.stats.seed_rates.push_back(std::stod(v));
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::filesystem::path> export_trajectories(
    const RunConfig& cfg, const EvalCell& cell, const Checkpoint* checkpoint,
    int n, const std::filesystem::path& dir) {
  if (cell.seeds.empty()) throw InvalidSpec("eval cell has no seeds");
  const EpisodeRunner runner(cfg, resolve_scene(cfg, cell.scene), cell.variant,
                             checkpoint);
  const NoiseLevel level =
      NoiseLevel::FromPlugLevel(cell.noise, runner.env_config());
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (std::uint64_t seed : cell.seeds) {
    for (int i = 0; i < cell.trials; ++i) {
      if (static_cast<int>(written.size()) >= n) return written;
      const EpisodeOutcome o = runner.run(episode_seed(seed, i), level, true);
      const std::string name = "trace_" + resolve_scene(cfg, cell.scene).name +
                               "_" + std::string(variant_name(cell.variant)) +
                               "_n" + noise_tag(cell.noise) + "_s" +
                               std::to_string(seed) + "_e" + std::to_string(i) +
                               (o.success ? "_success" : "_failure") + ".csv";
      const std::filesystem::path path = dir / name;
      std::ofstream os(path);
      if (!os) throw Error("cannot write " + path.string());
      write_trace_csv(os, o.trace);
      written.push_back(path);
    }
  }
  return written;
}

std::string field_csv_header() {
  std::string h = "y,z,distance";
  for (const char* part : {"att", "rep", "pf"}) {
    for (const char* a : {"dx", "dy", "dz", "rx", "ry", "rz"}) {
      h += std::string(",") + part + "_" + a;
    }
  }
  return h;
}

void export_field(std::ostream& csv, const SceneSpec& spec,
                  const RunConfig& cfg) {
  const FieldSettings& f = cfg.field;
  if (f.ny < 1 || f.nz < 1) throw InvalidSpec("field grid is empty");
  const Scene scene(spec, cfg.sample_count);
  const Pose& base = spec.base;
  const auto put = [&csv](const Twist& t) {
    for (int i = 0; i < 3; ++i) csv << ',' << format_double(t.translation[i]);
    for (int i = 0; i < 3; ++i) csv << ',' << format_double(t.rotation_deg[i]);
  };
  csv << field_csv_header() << '\n';
  for (int iz = 0; iz < f.nz; ++iz) {
    const double z =
        f.nz == 1 ? f.z_min : f.z_min + (f.z_max - f.z_min) * iz / (f.nz - 1);
    for (int iy = 0; iy < f.ny; ++iy) {
      const double y =
          f.ny == 1 ? f.y_min : f.y_min + (f.y_max - f.y_min) * iy / (f.ny - 1);
      const Pose plug = base * Pose::FromTranslation(Vec3(f.x, y, z));
      const PFBreakdown b = pf_action_breakdown(scene, plug, base, cfg.pf);
      const double d = closest_pair(scene.samples, plug, scene.socket).distance;
      csv << format_double(y) << ',' << format_double(z) << ','
          << format_double(d);
      put(b.attractive);
      put(b.repulsive);
      put(b.combined);
      csv << '\n';
    }
  }
}

void write_manifest(const std::filesystem::path& dir, const std::string& verb,
                    const RunConfig& cfg, std::uint64_t seed,
                    const std::vector<std::filesystem::path>& outputs,
                    const nlohmann::json& extra) {
  std::filesystem::create_directories(dir);
  nlohmann::json files = nlohmann::json::array();
  for (const auto& p : outputs) {
    files.push_back({{"path", std::filesystem::relative(p, dir).generic_string()},
                     {"fnv1a64", hex64(file_checksum(p))}});
  }
  const nlohmann::json m = {{"verb", verb},
                            {"config_hash", config_hash(cfg)},
                            {"seed", seed},
                            {"version", library_version()},
                            {"workers", 1},
                            {"config", run_config_to_json(cfg)},
                            {"outputs", files},
                            {"extra", extra}};
  std::ofstream os(dir / "manifest.json");
  if (!os) throw Error("cannot write manifest in " + dir.string());
  os << m.dump(2) << '\n';
}

}  // namespace pfrl
