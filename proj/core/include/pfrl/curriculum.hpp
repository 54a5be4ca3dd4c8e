#ifndef PFRL_CURRICULUM_HPP_
#define PFRL_CURRICULUM_HPP_

#include <deque>

#include <nlohmann/json.hpp>

namespace pfrl {

struct CurriculumConfig {
  double n_max = 5.0;      // mm (and deg)
  double step = 0.1;       // mm
  double raise_above = 0.75;
  double lower_below = 0.50;
  int window = 100;        // episodes

  int max_level() const;
  void validate() const;
};

void to_json(nlohmann::json& j, const CurriculumConfig& c);
void from_json(const nlohmann::json& j, CurriculumConfig& c);

// The noise level is kept as an integer number of steps so that repeated
// raises and lowers land on the same values every time.
struct CurriculumState {
  int level = 0;
  double n = 0.0;
  double beta = 0.0;
  std::deque<bool> window;  // most recent outcomes, oldest first

  static CurriculumState AtLevel(int level, const CurriculumConfig& cfg);
  static CurriculumState Start(const CurriculumConfig& cfg) {
    return AtLevel(0, cfg);
  }
  static CurriculumState Fixed(const CurriculumConfig& cfg) {
    return AtLevel(cfg.max_level(), cfg);
  }
  double success_rate() const;
};

// Requires a full window. Raises or lowers the level by one step, clamps to
// [0, n_max], recouples beta = n / n_max and clears the window when the
// level moves. Leaves the state untouched in the dead zone.
CurriculumState curriculum_update(const CurriculumState& state,
                                  const CurriculumConfig& cfg);

// Appends one outcome (dropping the oldest beyond the window size) and runs
// curriculum_update once the window is full. Returns true on a level change.
bool record_outcome(CurriculumState& state, bool success,
                    const CurriculumConfig& cfg);

}  // namespace pfrl

#endif  // PFRL_CURRICULUM_HPP_
