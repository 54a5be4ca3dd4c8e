#ifndef PFRL_GAE_HPP_
#define PFRL_GAE_HPP_

#include <span>
#include <vector>

namespace pfrl {

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// Generalised advantage estimation over one environment's step sequence.
// dones[t] marks that step t ended an episode, so nothing after it is
// bootstrapped into t. `bootstrap_value` is the value estimate of the state
// that follows the last step.
GaeResult compute_gae(std::span<const double> rewards,
                      std::span<const double> values,
                      std::span<const bool> dones, double bootstrap_value,
                      double gamma, double lambda);

}  // namespace pfrl

#endif  // PFRL_GAE_HPP_
