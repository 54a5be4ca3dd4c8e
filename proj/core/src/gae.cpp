#include "pfrl/gae.hpp"

#include "pfrl/errors.hpp"

namespace pfrl {

GaeResult compute_gae(std::span<const double> rewards,
                      std::span<const double> values,
                      std::span<const bool> dones, double bootstrap_value,
                      double gamma, double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n) {
    throw InvalidArgument("compute_gae: sequences must have equal length");
  }
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double running = 0.0;
  double next_value = bootstrap_value;
  for (std::size_t i = n; i-- > 0;) {
    const double live = dones[i] ? 0.0 : 1.0;
    const double delta = rewards[i] + gamma * next_value * live - values[i];
    running = delta + gamma * lambda * live * running;
    out.advantages[i] = running;
    out.returns[i] = running + values[i];
    next_value = values[i];
  }
  return out;
}

}  // namespace pfrl
