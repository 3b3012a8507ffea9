#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "seedline/service.hpp"

namespace seedline {

// One config object for the whole pipeline, parsed strictly: any key the
// schema does not define fails with Error(ConfigError) naming the path.
// Precedence: built-in defaults < config file < environment < CLI flags.

struct ServiceSpec {
  std::string stub;     // stub spec grammar; wins when nonempty
  std::string endpoint; // http base URL
  std::string token;
  int timeout_ms = 5000;
};

struct QualityThresholds {
  std::size_t low_max_chars = 20;   // shorter docs tier Low
  std::size_t high_min_chars = 200; // longer clean docs tier High
  double max_symbol_ratio = 0.3;    // above this, Low regardless of length
};

struct PipelineConfig {
  std::uint64_t seed = 42;
  int concurrency = 4;

  std::map<std::string, std::string> paths; // free-form name -> path

  double lid_min = 0.8;
  double align_min = 0.5;
  double tau_align = 0.1;
  double length_ratio_max = 3.0;

  ServiceSpec translator;
  ServiceSpec paraphraser;
  ServiceSpec scorer;
  ServiceSpec metric;
  RetryPolicy retry;
  int max_in_flight = 4;

  std::size_t tokenizer_target_size = 65269;
  std::size_t max_seq_len = 2048;

  double max_tag_share = 0.5;
  std::vector<std::string> exclude_tags;
  int quality_iterations = 3;
  bool skip_rewrite = false;
  QualityThresholds quality;

  double reward_beta = 2.0;
  int reward_max_n = 6;
  int rollouts_per_query = 1;

  bool chinese_centric_grouping = false;

  // Raw JSON of the optional "curriculum" section (a stage plan); parsed on
  // demand by the curriculum commands so the config layer stays thin.
  std::string curriculum_json;

  // When set (--stub), every service resolves to a stub; endpoints ignored.
  bool force_stubs = false;

  std::string config_path; // where this came from, for manifests
};

PipelineConfig default_config();
PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config_json(const std::string& text, const std::string& context);

// SEEDLINE_SEED, SEEDLINE_TRANSLATOR_ENDPOINT, SEEDLINE_PARAPHRASER_ENDPOINT,
// SEEDLINE_SCORER_ENDPOINT, SEEDLINE_METRIC_ENDPOINT.
void apply_env_overrides(PipelineConfig& config);

// Stable fingerprint of every semantic field (paths included), for manifests.
std::uint64_t config_hash(const PipelineConfig& config);

// Builds the client for one service slot. Falls back to "echo" ("constant:1"
// for scorer/metric) when force_stubs is set and no stub spec was given.
ServiceClient make_client(const PipelineConfig& config, const ServiceSpec& spec,
                          const std::string& default_stub = "echo");

struct ServiceSet {
  ServiceClient translator;
  ServiceClient paraphraser;
  ServiceClient scorer;
  ServiceClient metric;
};

ServiceSet make_services(const PipelineConfig& config);

} // namespace seedline
