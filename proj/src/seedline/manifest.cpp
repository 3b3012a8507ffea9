#include "seedline/manifest.hpp"

#include "json_detail.hpp"
#include "seedline/hash.hpp"
#include "seedline/json_io.hpp"

namespace seedline {

using detail::json;

namespace {

json to_json_obj(const RunManifest& m, bool with_wall) {
  json j;
  j["command"] = m.command;
  j["version"] = m.version;
  j["seed"] = m.seed;
  j["config_fingerprint"] = hex64(m.config_fingerprint);
  j["input_hashes"] = m.input_hashes;
  j["output_hashes"] = m.output_hashes;
  j["counts"] = m.counts;
  j["extra"] = m.extra;
  if (with_wall) j["wall_ms"] = m.wall_ms;
  return j;
}

} // namespace

std::string RunManifest::to_json() const { return to_json_obj(*this, true).dump(2) + "\n"; }
std::string RunManifest::comparable_json() const { return to_json_obj(*this, false).dump(2) + "\n"; }

RunManifest RunManifest::from_json(const std::string& text) {
  json j = detail::parse_json(text, "manifest");
  detail::require_object(j, "manifest");
  detail::check_keys(j, {"command", "version", "seed", "config_fingerprint", "input_hashes",
                         "output_hashes", "counts", "extra", "wall_ms"},
                     "manifest");
  RunManifest m;
  m.command = detail::get_string(j, "command", "manifest");
  m.version = detail::get_string(j, "version", "manifest");
  m.seed = static_cast<std::uint64_t>(detail::get_integer(j, "seed", "manifest"));
  m.config_fingerprint = std::stoull(detail::get_string(j, "config_fingerprint", "manifest"), nullptr, 16);
  m.input_hashes = detail::get_string_array(j, "input_hashes", "manifest");
  m.output_hashes = detail::get_string_array(j, "output_hashes", "manifest");
  const json& counts = detail::require_field(j, "counts", "manifest");
  detail::require_object(counts, "manifest.counts");
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (!it.value().is_number_integer()) {
      throw Error(ErrorKind::SchemaViolation, "manifest.counts values must be integers");
    }
    m.counts[it.key()] = it.value().get<long>();
  }
  const json& extra = detail::require_field(j, "extra", "manifest");
  detail::require_object(extra, "manifest.extra");
  for (auto it = extra.begin(); it != extra.end(); ++it) {
    if (!it.value().is_string()) {
      throw Error(ErrorKind::SchemaViolation, "manifest.extra values must be strings");
    }
    m.extra[it.key()] = it.value().get<std::string>();
  }
  if (j.contains("wall_ms")) m.wall_ms = detail::get_integer(j, "wall_ms", "manifest");
  return m;
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  write_file_atomic(path, manifest.to_json());
}

RunManifest read_manifest(const std::string& path) { return RunManifest::from_json(read_file(path)); }

std::string manifest_entry(const std::string& path) { return path + " " + hash_file(path); }

} // namespace seedline
