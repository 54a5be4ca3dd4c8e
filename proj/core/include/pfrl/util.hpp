#ifndef PFRL_UTIL_HPP_
#define PFRL_UTIL_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace pfrl {

// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);

// 64-bit FNV-1a; used for config hashes and output checksums.
std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t h = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);
std::uint64_t file_checksum(const std::filesystem::path& path);

// Mixes a base seed with stream identifiers (splitmix64 finaliser).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                          std::uint64_t b = 0, std::uint64_t c = 0);

}  // namespace pfrl

#endif  // PFRL_UTIL_HPP_
