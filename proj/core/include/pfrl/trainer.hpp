#ifndef PFRL_TRAINER_HPP_
#define PFRL_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pfrl/checkpoint.hpp"
#include "pfrl/config.hpp"
#include "pfrl/curriculum.hpp"
#include "pfrl/ppo.hpp"

namespace pfrl {

struct TrainLogRow {
  int iteration = 0;
  long env_steps = 0;
  double noise_mm = 0.0;
  double beta = 0.0;
  double success_rate = 0.0;  // episodes finished during the iteration
  int episodes = 0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double clip_frac = 0.0;
  double kl = 0.0;
};

std::string train_log_header();
void write_train_log_row(std::ostream& os, const TrainLogRow& row);

struct TrainHooks {
  std::function<void(const TrainLogRow&)> on_iteration;
  // Called every checkpoint_every iterations, and with the last good
  // parameters before a NonFiniteLoss propagates.
  std::function<void(const Checkpoint&, int iteration)> on_checkpoint;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<TrainLogRow> log;
  CurriculumState curriculum;
  long env_steps = 0;
  int iterations = 0;
};

// Executed action for every step of the first iteration equals the PF
// action when the residual scale starts at zero. pf_only returns at once
// with no parameters.
TrainResult train(const RunConfig& cfg, std::uint64_t seed,
                  const TrainHooks& hooks = {});

}  // namespace pfrl

#endif  // PFRL_TRAINER_HPP_
