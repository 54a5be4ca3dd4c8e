#include <gtest/gtest.h>

#include "pfrl/curriculum.hpp"
#include "pfrl/errors.hpp"

namespace pfrl {
namespace {

CurriculumState filled(int level, int successes, const CurriculumConfig& cfg) {
  CurriculumState s = CurriculumState::AtLevel(level, cfg);
  for (int i = 0; i < cfg.window; ++i) s.window.push_back(i < successes);
  return s;
}

TEST(Curriculum, LevelsMapToNoiseAndBeta) {
  const CurriculumConfig cfg;
  EXPECT_EQ(cfg.max_level(), 50);
  const CurriculumState s = CurriculumState::AtLevel(10, cfg);
  EXPECT_NEAR(s.n, 1.0, 1e-12);
  EXPECT_NEAR(s.beta, 0.2, 1e-12);
  EXPECT_EQ(CurriculumState::Fixed(cfg).n, 5.0);
  EXPECT_EQ(CurriculumState::Fixed(cfg).beta, 1.0);
  EXPECT_EQ(CurriculumState::Start(cfg).beta, 0.0);
}

TEST(Curriculum, HighSuccessRaises) {
  const CurriculumConfig cfg;
  const CurriculumState next = curriculum_update(filled(10, 80, cfg), cfg);
  EXPECT_NEAR(next.n, 1.1, 1e-12);
  EXPECT_NEAR(next.beta, 1.1 / 5.0, 1e-12);
  EXPECT_TRUE(next.window.empty());
}

TEST(Curriculum, LowSuccessLowers) {
  const CurriculumConfig cfg;
  const CurriculumState next = curriculum_update(filled(10, 40, cfg), cfg);
  EXPECT_NEAR(next.n, 0.9, 1e-12);
  EXPECT_NEAR(next.beta, 0.9 / 5.0, 1e-12);
}

TEST(Curriculum, DeadZoneLeavesStateUntouched) {
  const CurriculumConfig cfg;
  for (int k : {50, 60, 75}) {
    const CurriculumState before = filled(10, k, cfg);
    const CurriculumState after = curriculum_update(before, cfg);
    EXPECT_EQ(after.level, before.level) << k;
    EXPECT_EQ(after.window, before.window) << k;
  }
}

TEST(Curriculum, ClampsAtBounds) {
  const CurriculumConfig cfg;
  const CurriculumState top = curriculum_update(filled(50, 100, cfg), cfg);
  EXPECT_EQ(top.n, 5.0);
  EXPECT_EQ(top.beta, 1.0);
  const CurriculumState bottom = curriculum_update(filled(0, 0, cfg), cfg);
  EXPECT_EQ(bottom.n, 0.0);
  EXPECT_EQ(bottom.beta, 0.0);
}

TEST(Curriculum, PartialWindowIsRejected) {
  const CurriculumConfig cfg;
  CurriculumState s = CurriculumState::AtLevel(3, cfg);
  s.window.assign(99, true);
  EXPECT_THROW(curriculum_update(s, cfg), InvalidArgument);
}

TEST(Curriculum, RecordOutcomeUsesRollingWindow) {
  const CurriculumConfig cfg;
  CurriculumState s = CurriculumState::AtLevel(10, cfg);
  for (int i = 0; i < 99; ++i) EXPECT_FALSE(record_outcome(s, i % 3 != 0, cfg));
  // 66 of 99 so far; one more success gives 67% and no change.
  EXPECT_FALSE(record_outcome(s, true, cfg));
  EXPECT_EQ(s.window.size(), 100u);
  int changes = 0;
  while (!record_outcome(s, true, cfg)) ++changes;
  EXPECT_EQ(s.level, 11);
  EXPECT_TRUE(s.window.empty());
  EXPECT_LT(changes, 100);
}

TEST(Curriculum, ReplayedTraceIsMonotoneUnderSustainedSuccess) {
  const CurriculumConfig cfg;
  CurriculumState s = CurriculumState::Start(cfg);
  double last = s.n;
  int raises = 0;
  for (int i = 0; i < 100 * 60; ++i) {
    if (record_outcome(s, true, cfg)) ++raises;
    EXPECT_GE(s.n, last);
    EXPECT_NEAR(s.beta, s.n / cfg.n_max, 1e-12);
    last = s.n;
  }
  EXPECT_EQ(raises, 50);
  EXPECT_EQ(s.n, 5.0);
}

TEST(Curriculum, InvalidConfigRejected) {
  CurriculumConfig cfg;
  cfg.raise_above = 0.4;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.step = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.window = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace pfrl
