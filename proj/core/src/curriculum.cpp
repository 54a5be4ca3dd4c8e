#include "pfrl/curriculum.hpp"

#include <algorithm>
#include <cmath>

#include "pfrl/errors.hpp"

namespace pfrl {

int CurriculumConfig::max_level() const {
  return static_cast<int>(std::lround(n_max / step));
}

void CurriculumConfig::validate() const {
  if (!(n_max > 0.0) || !(step > 0.0)) {
    throw ConfigError("curriculum: n_max and step must be > 0");
  }
  if (std::abs(max_level() * step - n_max) > 1e-9 * n_max) {
    throw ConfigError("curriculum: n_max must be a whole number of steps");
  }
  if (!(lower_below >= 0.0 && lower_below <= raise_above && raise_above <= 1.0)) {
    throw ConfigError("curriculum: need 0 <= lower_below <= raise_above <= 1");
  }
  if (window < 1) throw ConfigError("curriculum: window must be >= 1");
}

void to_json(nlohmann::json& j, const CurriculumConfig& c) {
  j = {{"n_max", c.n_max},
       {"step", c.step},
       {"raise_above", c.raise_above},
       {"lower_below", c.lower_below},
       {"window", c.window}};
}

void from_json(const nlohmann::json& j, CurriculumConfig& c) {
  const CurriculumConfig d;
  c.n_max = j.value("n_max", d.n_max);
  c.step = j.value("step", d.step);
  c.raise_above = j.value("raise_above", d.raise_above);
  c.lower_below = j.value("lower_below", d.lower_below);
  c.window = j.value("window", d.window);
}

CurriculumState CurriculumState::AtLevel(int level,
                                         const CurriculumConfig& cfg) {
  CurriculumState s;
  s.level = std::clamp(level, 0, cfg.max_level());
  s.n = s.level == cfg.max_level() ? cfg.n_max : s.level * cfg.step;
  s.beta = s.n / cfg.n_max;
  return s;
}

double CurriculumState::success_rate() const {
  if (window.empty()) return 0.0;
  const auto wins = std::count(window.begin(), window.end(), true);
  return static_cast<double>(wins) / static_cast<double>(window.size());
}

CurriculumState curriculum_update(const CurriculumState& state,
                                  const CurriculumConfig& cfg) {
  if (static_cast<int>(state.window.size()) < cfg.window) {
    throw InvalidArgument("curriculum_update: window is not full");
  }
  const double rate = state.success_rate();
  int level = state.level;
  if (rate > cfg.raise_above) {
    level = std::min(level + 1, cfg.max_level());
  } else if (rate < cfg.lower_below) {
    level = std::max(level - 1, 0);
  } else {
    return state;
  }
  if (level == state.level) {
    // Clamped at a bound: the state is unchanged, the window keeps rolling.
    return state;
  }
  return CurriculumState::AtLevel(level, cfg);
}

bool record_outcome(CurriculumState& state, bool success,
                    const CurriculumConfig& cfg) {
  state.window.push_back(success);
  while (static_cast<int>(state.window.size()) > cfg.window) {
    state.window.pop_front();
  }
  if (static_cast<int>(state.window.size()) < cfg.window) return false;
  const int before = state.level;
  state = curriculum_update(state, cfg);
  return state.level != before;
}

}  // namespace pfrl
