#ifndef PFRL_CHECKPOINT_HPP_
#define PFRL_CHECKPOINT_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>

#include "pfrl/networks.hpp"
#include "pfrl/policy.hpp"

namespace pfrl {

// Text format, one item per line:
//   pfrl-checkpoint 1
//   meta <single-line JSON: variant, actor, critic, translation_scale, ...>
//   params <count>
//   <count lines of hexfloat values>
//   checksum <16 hex digits, FNV-1a over every preceding line>
struct Checkpoint {
  static constexpr int kVersion = 1;

  Variant variant = Variant::kFull;
  ActorArch actor;
  CriticArch critic;
  double translation_scale = kDefaultTranslationScale;
  ResidualLimits limits;
  Vector params;
  nlohmann::json extra = nlohmann::json::object();  // free-form provenance
};

void write_checkpoint(std::ostream& os, const Checkpoint& ck);
Checkpoint read_checkpoint(std::istream& is);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Throws ChecksumMismatch when the checkpoint cannot drive `variant`.
void require_compatible(const Checkpoint& ck, Variant variant);

}  // namespace pfrl

#endif  // PFRL_CHECKPOINT_HPP_
