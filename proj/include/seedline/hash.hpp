#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace seedline {

// FNV-1a, 64 bit. Used for content hashes in manifests and for deriving
// deterministic per-record seeds. Not cryptographic, stated in the docs.
constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

constexpr std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = kFnvOffset) {
  std::uint64_t h = seed;
  for (char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

constexpr std::uint64_t fnv1a64_u64(std::uint64_t value, std::uint64_t seed = kFnvOffset) {
  std::uint64_t h = seed;
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (8 * i)) & 0xFF;
    h *= kFnvPrime;
  }
  return h;
}

std::string hex64(std::uint64_t value);

// Hash of a file's raw bytes, as "fnv1a64:<16 hex digits>".
std::string hash_file(const std::string& path);
std::string hash_bytes(std::string_view data);

} // namespace seedline
