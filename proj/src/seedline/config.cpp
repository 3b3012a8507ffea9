#include "seedline/config.hpp"

#include <cstdlib>

#include "json_detail.hpp"
#include "seedline/hash.hpp"
#include "seedline/json_io.hpp"
#include "seedline/types.hpp"

namespace seedline {

using detail::json;

namespace {

ServiceSpec parse_service(const json& j, const std::string& context) {
  detail::require_object(j, context);
  detail::check_keys(j, {"stub", "endpoint", "token", "timeout_ms"}, context);
  ServiceSpec spec;
  if (j.contains("stub")) spec.stub = detail::get_string(j, "stub", context);
  if (j.contains("endpoint")) spec.endpoint = detail::get_string(j, "endpoint", context);
  if (j.contains("token")) spec.token = detail::get_string(j, "token", context);
  if (j.contains("timeout_ms")) spec.timeout_ms = static_cast<int>(detail::get_integer(j, "timeout_ms", context));
  if (!spec.stub.empty() && !spec.endpoint.empty()) {
    throw Error(ErrorKind::ConfigError, context + ": give either 'stub' or 'endpoint', not both");
  }
  return spec;
}

double checked_fraction(const json& j, const std::string& key, const std::string& context) {
  double v = detail::get_number(j, key, context);
  if (v < 0.0 || v > 1.0) throw Error(ErrorKind::ConfigError, context + "." + key + " must be in [0, 1]");
  return v;
}

} // namespace

PipelineConfig default_config() { return PipelineConfig{}; }

PipelineConfig parse_config_json(const std::string& text, const std::string& context) {
  json root = detail::parse_json(text, context);
  detail::require_object(root, context);
  detail::check_keys(root,
                     {"seed", "concurrency", "paths", "thresholds", "services", "tokenizer", "mono",
                      "reward", "grouping", "curriculum"},
                     context);
  PipelineConfig cfg;

  if (root.contains("seed")) {
    long s = detail::get_integer(root, "seed", context);
    if (s < 0) throw Error(ErrorKind::ConfigError, context + ".seed must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (root.contains("concurrency")) {
    cfg.concurrency = static_cast<int>(detail::get_integer(root, "concurrency", context));
    if (cfg.concurrency < 1) throw Error(ErrorKind::ConfigError, context + ".concurrency must be >= 1");
  }

  if (root.contains("paths")) {
    const json& paths = root["paths"];
    detail::require_object(paths, context + ".paths");
    for (auto it = paths.begin(); it != paths.end(); ++it) {
      if (!it.value().is_string()) {
        throw Error(ErrorKind::ConfigError, context + ".paths." + it.key() + " must be a string");
      }
      cfg.paths[it.key()] = it.value().get<std::string>();
    }
  }

  if (root.contains("thresholds")) {
    const json& th = root["thresholds"];
    const std::string c = context + ".thresholds";
    detail::require_object(th, c);
    detail::check_keys(th, {"lid_min", "align_min", "tau_align", "length_ratio_max"}, c);
    if (th.contains("lid_min")) cfg.lid_min = checked_fraction(th, "lid_min", c);
    if (th.contains("align_min")) cfg.align_min = checked_fraction(th, "align_min", c);
    if (th.contains("tau_align")) cfg.tau_align = checked_fraction(th, "tau_align", c);
    if (th.contains("length_ratio_max")) {
      cfg.length_ratio_max = detail::get_number(th, "length_ratio_max", c);
      if (cfg.length_ratio_max < 1.0) throw Error(ErrorKind::ConfigError, c + ".length_ratio_max must be >= 1");
    }
  }

  if (root.contains("services")) {
    const json& sv = root["services"];
    const std::string c = context + ".services";
    detail::require_object(sv, c);
    detail::check_keys(sv, {"translator", "paraphraser", "scorer", "metric", "retry", "max_in_flight"}, c);
    if (sv.contains("translator")) cfg.translator = parse_service(sv["translator"], c + ".translator");
    if (sv.contains("paraphraser")) cfg.paraphraser = parse_service(sv["paraphraser"], c + ".paraphraser");
    if (sv.contains("scorer")) cfg.scorer = parse_service(sv["scorer"], c + ".scorer");
    if (sv.contains("metric")) cfg.metric = parse_service(sv["metric"], c + ".metric");
    if (sv.contains("retry")) {
      const json& rt = sv["retry"];
      const std::string rc = c + ".retry";
      detail::require_object(rt, rc);
      detail::check_keys(rt, {"max_attempts", "backoff_ms"}, rc);
      if (rt.contains("max_attempts")) {
        cfg.retry.max_attempts = static_cast<int>(detail::get_integer(rt, "max_attempts", rc));
        if (cfg.retry.max_attempts < 1) throw Error(ErrorKind::ConfigError, rc + ".max_attempts must be >= 1");
      }
      if (rt.contains("backoff_ms")) {
        cfg.retry.backoff_ms = static_cast<int>(detail::get_integer(rt, "backoff_ms", rc));
        if (cfg.retry.backoff_ms < 0) throw Error(ErrorKind::ConfigError, rc + ".backoff_ms must be >= 0");
      }
    }
    if (sv.contains("max_in_flight")) {
      cfg.max_in_flight = static_cast<int>(detail::get_integer(sv, "max_in_flight", c));
      if (cfg.max_in_flight < 1) throw Error(ErrorKind::ConfigError, c + ".max_in_flight must be >= 1");
    }
  }

  if (root.contains("tokenizer")) {
    const json& tk = root["tokenizer"];
    const std::string c = context + ".tokenizer";
    detail::require_object(tk, c);
    detail::check_keys(tk, {"target_size", "max_seq_len"}, c);
    if (tk.contains("target_size")) {
      long v = detail::get_integer(tk, "target_size", c);
      if (v < 1) throw Error(ErrorKind::ConfigError, c + ".target_size must be >= 1");
      cfg.tokenizer_target_size = static_cast<std::size_t>(v);
    }
    if (tk.contains("max_seq_len")) {
      long v = detail::get_integer(tk, "max_seq_len", c);
      if (v < 1) throw Error(ErrorKind::ConfigError, c + ".max_seq_len must be >= 1");
      cfg.max_seq_len = static_cast<std::size_t>(v);
    }
  }

  if (root.contains("mono")) {
    const json& mo = root["mono"];
    const std::string c = context + ".mono";
    detail::require_object(mo, c);
    detail::check_keys(mo,
                       {"max_tag_share", "exclude_tags", "quality_iterations", "skip_rewrite",
                        "low_max_chars", "high_min_chars", "max_symbol_ratio"},
                       c);
    if (mo.contains("max_tag_share")) {
      cfg.max_tag_share = detail::get_number(mo, "max_tag_share", c);
      if (cfg.max_tag_share <= 0.0 || cfg.max_tag_share > 1.0) {
        throw Error(ErrorKind::ConfigError, c + ".max_tag_share must be in (0, 1]");
      }
    }
    if (mo.contains("exclude_tags")) cfg.exclude_tags = detail::get_string_array(mo, "exclude_tags", c);
    if (mo.contains("quality_iterations")) {
      cfg.quality_iterations = static_cast<int>(detail::get_integer(mo, "quality_iterations", c));
      if (cfg.quality_iterations < 1) throw Error(ErrorKind::ConfigError, c + ".quality_iterations must be >= 1");
    }
    if (mo.contains("skip_rewrite")) cfg.skip_rewrite = detail::get_bool(mo, "skip_rewrite", c);
    if (mo.contains("low_max_chars")) {
      cfg.quality.low_max_chars = static_cast<std::size_t>(detail::get_integer(mo, "low_max_chars", c));
    }
    if (mo.contains("high_min_chars")) {
      cfg.quality.high_min_chars = static_cast<std::size_t>(detail::get_integer(mo, "high_min_chars", c));
    }
    if (mo.contains("max_symbol_ratio")) cfg.quality.max_symbol_ratio = checked_fraction(mo, "max_symbol_ratio", c);
  }

  if (root.contains("reward")) {
    const json& rw = root["reward"];
    const std::string c = context + ".reward";
    detail::require_object(rw, c);
    detail::check_keys(rw, {"beta", "max_n", "rollouts_per_query"}, c);
    if (rw.contains("beta")) {
      cfg.reward_beta = detail::get_number(rw, "beta", c);
      if (cfg.reward_beta <= 0.0) throw Error(ErrorKind::ConfigError, c + ".beta must be > 0");
    }
    if (rw.contains("max_n")) {
      cfg.reward_max_n = static_cast<int>(detail::get_integer(rw, "max_n", c));
      if (cfg.reward_max_n < 1) throw Error(ErrorKind::ConfigError, c + ".max_n must be >= 1");
    }
    if (rw.contains("rollouts_per_query")) {
      cfg.rollouts_per_query = static_cast<int>(detail::get_integer(rw, "rollouts_per_query", c));
      if (cfg.rollouts_per_query < 1) throw Error(ErrorKind::ConfigError, c + ".rollouts_per_query must be >= 1");
    }
  }

  if (root.contains("grouping")) {
    const json& gr = root["grouping"];
    const std::string c = context + ".grouping";
    detail::require_object(gr, c);
    detail::check_keys(gr, {"chinese_centric"}, c);
    if (gr.contains("chinese_centric")) cfg.chinese_centric_grouping = detail::get_bool(gr, "chinese_centric", c);
  }

  if (root.contains("curriculum")) {
    detail::require_object(root["curriculum"], context + ".curriculum");
    cfg.curriculum_json = root["curriculum"].dump();
  }

  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  PipelineConfig cfg = parse_config_json(read_file(path), path);
  cfg.config_path = path;
  return cfg;
}

void apply_env_overrides(PipelineConfig& config) {
  if (const char* seed = std::getenv("SEEDLINE_SEED")) {
    try {
      config.seed = std::stoull(seed);
    } catch (const std::exception&) {
      throw Error(ErrorKind::ConfigError, "SEEDLINE_SEED is not an unsigned integer");
    }
  }
  struct EnvSlot {
    const char* var;
    ServiceSpec* spec;
  };
  EnvSlot slots[] = {
      {"SEEDLINE_TRANSLATOR_ENDPOINT", &config.translator},
      {"SEEDLINE_PARAPHRASER_ENDPOINT", &config.paraphraser},
      {"SEEDLINE_SCORER_ENDPOINT", &config.scorer},
      {"SEEDLINE_METRIC_ENDPOINT", &config.metric},
  };
  for (const auto& slot : slots) {
    if (const char* value = std::getenv(slot.var)) {
      slot.spec->endpoint = value;
      slot.spec->stub.clear();
    }
  }
}

std::uint64_t config_hash(const PipelineConfig& config) {
  std::string blob;
  auto add = [&blob](const std::string& key, const std::string& value) {
    blob += key;
    blob += '=';
    blob += value;
    blob += '\x1f';
  };
  add("seed", std::to_string(config.seed));
  add("concurrency", std::to_string(config.concurrency));
  for (const auto& [k, v] : config.paths) add("paths." + k, v);
  add("lid_min", format_real(config.lid_min));
  add("align_min", format_real(config.align_min));
  add("tau_align", format_real(config.tau_align));
  add("length_ratio_max", format_real(config.length_ratio_max));
  auto add_service = [&add](const std::string& name, const ServiceSpec& s) {
    add(name + ".stub", s.stub);
    add(name + ".endpoint", s.endpoint);
    add(name + ".timeout_ms", std::to_string(s.timeout_ms));
  };
  add_service("translator", config.translator);
  add_service("paraphraser", config.paraphraser);
  add_service("scorer", config.scorer);
  add_service("metric", config.metric);
  add("retry.max_attempts", std::to_string(config.retry.max_attempts));
  add("retry.backoff_ms", std::to_string(config.retry.backoff_ms));
  add("max_in_flight", std::to_string(config.max_in_flight));
  add("tokenizer.target_size", std::to_string(config.tokenizer_target_size));
  add("tokenizer.max_seq_len", std::to_string(config.max_seq_len));
  add("mono.max_tag_share", format_real(config.max_tag_share));
  for (const auto& tag : config.exclude_tags) add("mono.exclude_tags", tag);
  add("mono.quality_iterations", std::to_string(config.quality_iterations));
  add("mono.skip_rewrite", config.skip_rewrite ? "1" : "0");
  add("mono.low_max_chars", std::to_string(config.quality.low_max_chars));
  add("mono.high_min_chars", std::to_string(config.quality.high_min_chars));
  add("mono.max_symbol_ratio", format_real(config.quality.max_symbol_ratio));
  add("reward.beta", format_real(config.reward_beta));
  add("reward.max_n", std::to_string(config.reward_max_n));
  add("reward.rollouts_per_query", std::to_string(config.rollouts_per_query));
  add("grouping.chinese_centric", config.chinese_centric_grouping ? "1" : "0");
  add("curriculum", config.curriculum_json);
  add("force_stubs", config.force_stubs ? "1" : "0");
  return fnv1a64(blob);
}

ServiceClient make_client(const PipelineConfig& config, const ServiceSpec& spec,
                          const std::string& default_stub) {
  std::shared_ptr<Backend> backend;
  if (config.force_stubs || !spec.stub.empty() || spec.endpoint.empty()) {
    backend = make_stub_backend(spec.stub.empty() ? default_stub : spec.stub);
  } else {
    backend = make_http_backend(spec.endpoint, spec.token, spec.timeout_ms);
  }
  return ServiceClient(std::move(backend), config.retry, config.max_in_flight);
}

ServiceSet make_services(const PipelineConfig& config) {
  return ServiceSet{
      make_client(config, config.translator, "echo"),
      make_client(config, config.paraphraser, "echo"),
      make_client(config, config.scorer, "constant:1"),
      make_client(config, config.metric, "constant:1"),
  };
}

} // namespace seedline
