#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "pfrl/checkpoint.hpp"
#include "pfrl/errors.hpp"

namespace pfrl {
namespace {

Checkpoint sample_checkpoint() {
  Checkpoint ck;
  ck.variant = Variant::kFull;
  ck.actor.mlp = {8};
  ck.actor.lstm = {4};
  ck.critic.mlp = {6};
  const ActorCritic net(ck.actor, ck.critic);
  ck.params = net.init_params(17);
  ck.params[0] = 1.0 / 3.0;
  ck.params[1] = -0.0;
  ck.params[2] = 5e-324;
  ck.extra = {{"seed", 17}};
  return ck;
}

std::string to_text(const Checkpoint& ck) {
  std::ostringstream os;
  write_checkpoint(os, ck);
  return os.str();
}

TEST(Checkpoint, RoundTripIsBitExact) {
  const Checkpoint ck = sample_checkpoint();
  std::istringstream is(to_text(ck));
  const Checkpoint back = read_checkpoint(is);
  ASSERT_EQ(back.params.size(), ck.params.size());
  for (int i = 0; i < ck.params.size(); ++i) {
    EXPECT_EQ(std::memcmp(&back.params[i], &ck.params[i], sizeof(double)), 0) << i;
  }
  EXPECT_EQ(back.variant, ck.variant);
  EXPECT_EQ(back.actor, ck.actor);
  EXPECT_EQ(back.critic, ck.critic);
  EXPECT_EQ(back.extra, ck.extra);
  EXPECT_EQ(to_text(back), to_text(ck));
}

TEST(Checkpoint, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "pfrl_ck_test.pfrl";
  const Checkpoint ck = sample_checkpoint();
  save_checkpoint(path, ck);
  EXPECT_EQ(load_checkpoint(path).params, ck.params);
  std::filesystem::remove(path);
}

TEST(Checkpoint, CorruptedPayloadIsRejected) {
  std::string text = to_text(sample_checkpoint());
  const auto pos = text.find("params");
  const auto line = text.find('\n', pos) + 1;
  text[line + 4] = text[line + 4] == '1' ? '2' : '1';
  std::istringstream is(text);
  EXPECT_THROW(read_checkpoint(is), ChecksumMismatch);
}

TEST(Checkpoint, TruncatedFileIsRejected) {
  const std::string text = to_text(sample_checkpoint());
  std::istringstream is(text.substr(0, text.size() / 2));
  EXPECT_THROW(read_checkpoint(is), ChecksumMismatch);
}

TEST(Checkpoint, UnknownVersionIsRejected) {
  std::string text = to_text(sample_checkpoint());
  text.replace(0, text.find('\n'), "pfrl-checkpoint 99");
  std::istringstream is(text);
  EXPECT_THROW(read_checkpoint(is), ChecksumMismatch);
}

TEST(Checkpoint, CompatibilityRequiresMatchingVariantAndShape) {
  Checkpoint ck = sample_checkpoint();
  EXPECT_NO_THROW(require_compatible(ck, Variant::kFull));
  EXPECT_THROW(require_compatible(ck, Variant::kPfResidualNoCurriculum),
               ChecksumMismatch);
  EXPECT_THROW(require_compatible(ck, Variant::kPfLearnedW), ChecksumMismatch);
  EXPECT_THROW(require_compatible(ck, Variant::kPfResidualLearnedBeta),
               ChecksumMismatch);
  ck.actor.output_dim = 7;
  EXPECT_THROW(require_compatible(ck, Variant::kFull), ChecksumMismatch);
}

}  // namespace
}  // namespace pfrl
