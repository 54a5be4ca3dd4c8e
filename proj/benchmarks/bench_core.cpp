#include <benchmark/benchmark.h>

#include <random>

#include "pfrl/env.hpp"
#include "pfrl/geometry.hpp"
#include "pfrl/networks.hpp"
#include "pfrl/potential_field.hpp"
#include "pfrl/ppo.hpp"

namespace {

using namespace pfrl;

std::vector<Pose> poses(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> off(-3.0, 3.0), z(-10.0, 10.0), tilt(-3.0, 3.0);
  std::vector<Pose> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(Pose::FromRpyDeg(Vec3(off(rng), off(rng), z(rng)), tilt(rng),
                                   tilt(rng), tilt(rng)));
  }
  return out;
}

void BM_SocketSdf(benchmark::State& state) {
  const SocketModel socket = make_socket(catalog_scene("easy_box"));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-40.0, 40.0);
  std::vector<Vec3> pts(1024);
  for (auto& p : pts) p = Vec3(u(rng), u(rng), 0.5 * u(rng));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(socket.local_sdf(pts[i++ & 1023]));
  }
}
BENCHMARK(BM_SocketSdf);

void BM_ClosestPair(benchmark::State& state) {
  const Scene scene(catalog_scene("easy_cylinder"), static_cast<int>(state.range(0)));
  const auto ps = poses(64, 2);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(closest_pair(scene.samples, ps[i++ & 63], scene.socket));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ClosestPair)->Arg(300)->Arg(1000)->Arg(3000);

void BM_PfAction(benchmark::State& state) {
  const Scene scene(catalog_scene("easy_cylinder"), 1000);
  const PFConfig cfg;
  const auto ps = poses(64, 3);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        pf_action_breakdown(scene, ps[i++ & 63], scene.socket.base(), cfg));
  }
}
BENCHMARK(BM_PfAction);

void BM_EnvStep(benchmark::State& state) {
  auto scene = std::make_shared<const Scene>(catalog_scene("easy_cylinder"), 1000);
  InsertionEnv env(scene, EnvConfig{});
  const Twist down{Vec3(0, 0, -0.5), Vec3::Zero()};
  std::uint64_t episode = 0;
  env.reset(NoiseLevel::None(), episode);
  for (auto _ : state) {
    const StepResult r = env.step(down, NoiseLevel::None());
    if (r.done) env.reset(NoiseLevel::None(), ++episode);
  }
}
BENCHMARK(BM_EnvStep);

void BM_ActorCriticGradient(benchmark::State& state) {
  const ActorCritic net(ActorArch{}, CriticArch{});
  const Vector params = net.init_params(4);
  const int segments = static_cast<int>(state.range(0));
  RolloutBuffer buf(segments, 32, 32, 24, 72, 6);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < buf.actor_in.size(); ++i) buf.actor_in.data()[i] = n(rng);
  for (int i = 0; i < buf.critic_in.size(); ++i) buf.critic_in.data()[i] = n(rng);
  for (int i = 0; i < buf.actions.size(); ++i) buf.actions.data()[i] = 0.5 * n(rng);
  buf.logp.setConstant(-4.0);
  buf.segment_start[0] = net.zero_hidden(segments);
  std::vector<SegmentRef> refs;
  for (int e = 0; e < segments; ++e) refs.push_back({e, 0});
  const Minibatch mb = gather_minibatch(buf, refs);
  const PPOConfig cfg;
  const LossFn loss = make_ppo_loss(mb, cfg, nullptr);
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.gradient(params, loss, mb.batch));
  }
  state.SetItemsProcessed(state.iterations() * segments * 32);
}
BENCHMARK(BM_ActorCriticGradient)->Arg(8)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
