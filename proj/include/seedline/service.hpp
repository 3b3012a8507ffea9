#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "seedline/lang.hpp"

namespace seedline {

// Model-backed operations (translate, paraphrase, candidate scoring, quality
// metrics) go through this layer. Everything that needs a model takes a
// Backend so desk-scale runs swap in deterministic stubs; the HTTP backend
// speaks one JSON object per line against a base URL.

struct DecodeParams {
  int beam_size = 4;
  double temperature = 0.0;
  std::uint64_t sample_seed = 0;

  bool operator==(const DecodeParams&) const = default;
};

struct TranslateRequest {
  std::string id;
  std::string text;
  Lang src = Lang::from_code("en");
  Lang tgt = Lang::from_code("de");
  DecodeParams decode;
};

struct ParaphraseRequest {
  std::string id;
  std::string text;
  Lang lang = Lang::from_code("en");
  DecodeParams decode;
};

struct ScoreRequest {
  std::string id;
  std::string src_text;
  std::vector<std::string> candidates;
};

struct MetricRequest {
  std::string id;
  std::string src_text;
  std::string hypothesis;
  std::optional<std::string> reference;
};

struct TextResponse {
  std::string request_id;
  std::string text;
};

struct ScoresResponse {
  std::string request_id;
  std::vector<double> scores;
};

struct MetricResponse {
  std::string request_id;
  double score = 0.0;
};

class Backend {
public:
  virtual ~Backend() = default;
  virtual TextResponse translate(const TranslateRequest& req) = 0;
  virtual TextResponse paraphrase(const ParaphraseRequest& req) = 0;
  virtual ScoresResponse score(const ScoreRequest& req) = 0;
  virtual MetricResponse metric(const MetricRequest& req) = 0;
  virtual std::string describe() const = 0;
};

// Stub spec grammar: "echo" | "fixed:<text>" | "constant:<value>" |
// "corrupt:<rate>:<seed>". Unknown specs raise Error(ConfigError).
std::unique_ptr<Backend> make_stub_backend(const std::string& spec);

// Line-delimited JSON over HTTP POST (paths /translate, /paraphrase, /score,
// /metric under the base URL). `token`, when nonempty, is sent as a static
// X-Auth-Token header; there is no other auth.
std::unique_ptr<Backend> make_http_backend(const std::string& base_url, const std::string& token,
                                           int timeout_ms);

struct RetryPolicy {
  int max_attempts = 1;
  int backoff_ms = 0;
};

// Wraps a backend with retries and a bound on concurrent in-flight calls.
// Failures surface as Error(Timeout | BackendError | MalformedResponse) with
// `attempts` filled in after the policy is exhausted.
class ServiceClient {
public:
  ServiceClient(std::shared_ptr<Backend> backend, RetryPolicy policy, int max_in_flight = 4);

  TextResponse translate(const TranslateRequest& req) const;
  TextResponse paraphrase(const ParaphraseRequest& req) const;
  ScoresResponse score(const ScoreRequest& req) const;
  MetricResponse metric(const MetricRequest& req) const;

  const Backend& backend() const { return *backend_; }

private:
  template <typename Fn>
  auto with_retries(Fn&& fn) const;

  std::shared_ptr<Backend> backend_;
  RetryPolicy policy_;
  std::shared_ptr<class InFlightGate> gate_;
};

} // namespace seedline
