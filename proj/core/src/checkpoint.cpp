#include "pfrl/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "pfrl/errors.hpp"
#include "pfrl/util.hpp"

namespace pfrl {
namespace {

constexpr const char* kMagic = "pfrl-checkpoint";

std::string hexfloat(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

std::string next_line(std::istream& is, std::uint64_t& hash) {
  std::string line;
  if (!std::getline(is, line)) {
    throw ChecksumMismatch("checkpoint truncated");
  }
  hash = fnv1a64(line + "\n", hash);
  return line;
}

std::string expect_prefix(const std::string& line, const std::string& key) {
  if (line.rfind(key + " ", 0) != 0) {
    throw ChecksumMismatch("checkpoint: expected '" + key + "' line");
  }
  return line.substr(key.size() + 1);
}

}  // namespace

void write_checkpoint(std::ostream& os, const Checkpoint& ck) {
  nlohmann::json meta;
  meta["variant"] = variant_name(ck.variant);
  meta["actor"] = ck.actor;
  meta["critic"] = ck.critic;
  meta["translation_scale"] = ck.translation_scale;
  meta["residual_limits"] = {{"tr", ck.limits.tr}, {"rot", ck.limits.rot}};
  meta["extra"] = ck.extra;

  std::ostringstream body;
  body << kMagic << ' ' << Checkpoint::kVersion << '\n';
  body << "meta " << meta.dump() << '\n';
  body << "params " << ck.params.size() << '\n';
  for (Eigen::Index i = 0; i < ck.params.size(); ++i) {
    body << hexfloat(ck.params[i]) << '\n';
  }
  const std::string text = body.str();
  os << text << "checksum " << hex64(fnv1a64(text)) << '\n';
}

Checkpoint read_checkpoint(std::istream& is) {
  std::uint64_t hash = fnv1a64("");
  const std::string header = next_line(is, hash);
  const std::string version = expect_prefix(header, kMagic);
  if (version != std::to_string(Checkpoint::kVersion)) {
    throw ChecksumMismatch("checkpoint: unsupported version " + version);
  }

  Checkpoint ck;
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(expect_prefix(next_line(is, hash), "meta"));
    ck.variant = parse_variant(meta.at("variant").get<std::string>());
    ck.actor = meta.at("actor").get<ActorArch>();
    ck.critic = meta.at("critic").get<CriticArch>();
    ck.translation_scale = meta.at("translation_scale").get<double>();
    ck.limits.tr = meta.at("residual_limits").at("tr").get<double>();
    ck.limits.rot = meta.at("residual_limits").at("rot").get<double>();
    ck.extra = meta.value("extra", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw ChecksumMismatch(std::string("checkpoint metadata: ") + e.what());
  } catch (const UnknownVariant& e) {
    throw ChecksumMismatch(std::string("checkpoint metadata: ") + e.what());
  }

  const std::string count_text = expect_prefix(next_line(is, hash), "params");
  char* end = nullptr;
  const long count = std::strtol(count_text.c_str(), &end, 10);
  if (*end != '\0' || count < 0) {
    throw ChecksumMismatch("checkpoint: bad parameter count");
  }
  ck.params.resize(count);
  for (long i = 0; i < count; ++i) {
    const std::string line = next_line(is, hash);
    ck.params[i] = std::strtod(line.c_str(), &end);
    if (end == line.c_str() || *end != '\0') {
      throw ChecksumMismatch("checkpoint: bad parameter value");
    }
  }

  std::uint64_t ignored = 0;
  const std::string stored = expect_prefix(next_line(is, ignored), "checksum");
  if (stored != hex64(hash)) {
    throw ChecksumMismatch("checkpoint checksum mismatch");
  }
  if (ActorCritic(ck.actor, ck.critic).num_params() != count) {
    throw ChecksumMismatch("checkpoint parameter count does not match arch");
  }
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write checkpoint " + path.string());
  write_checkpoint(os, ck);
  if (!os) throw Error("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot read checkpoint " + path.string());
  return read_checkpoint(is);
}

void require_compatible(const Checkpoint& ck, Variant variant) {
  if (ck.variant != variant) {
    throw ChecksumMismatch("checkpoint was trained for variant '" +
                           std::string(variant_name(ck.variant)) +
                           "', not '" + std::string(variant_name(variant)) +
                           "'");
  }
  if (ck.actor.output_dim != variant_action_dim(variant) ||
      ck.actor.input_dim != kActorInputSize ||
      ck.critic.input_dim != kCriticInputSize) {
    throw ChecksumMismatch("checkpoint architecture does not fit the variant");
  }
}

}  // namespace pfrl
