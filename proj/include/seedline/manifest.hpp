#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace seedline {

inline constexpr const char* kToolkitVersion = "0.1.0";

// Every artifact-producing command writes one of these next to its primary
// output, atomically and only on success. `wall_ms` is informational;
// comparisons for reproducibility use comparable_json(), which strips it.
struct RunManifest {
  std::string command;                    // argv joined with spaces
  std::string version = kToolkitVersion;
  std::uint64_t seed = 0;
  std::uint64_t config_fingerprint = 0;
  std::vector<std::string> input_hashes;  // "path fnv1a64:<hex>"
  std::vector<std::string> output_hashes; // same shape
  std::map<std::string, long> counts;
  std::map<std::string, std::string> extra;
  long wall_ms = 0;

  std::string to_json() const;
  static RunManifest from_json(const std::string& text);

  // Serialization with wall_ms removed: equal strings == same run content.
  std::string comparable_json() const;
};

void write_manifest(const std::string& path, const RunManifest& manifest);
RunManifest read_manifest(const std::string& path);

// "path fnv1a64:<hex>" for manifest entries.
std::string manifest_entry(const std::string& path);

} // namespace seedline
