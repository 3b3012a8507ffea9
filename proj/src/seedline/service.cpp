#include "seedline/service.hpp"

#include <chrono>
#include <semaphore>
#include <thread>

#include <httplib.h>

#include "json_detail.hpp"
#include "seedline/hash.hpp"
#include "seedline/rng.hpp"
#include "seedline/utf8.hpp"

namespace seedline {

using detail::json;

namespace {

constexpr std::string_view kCorruptAlphabet = "abcdefghijklmnopqrstuvwxyz";

class EchoBackend : public Backend {
public:
  TextResponse translate(const TranslateRequest& req) override { return {req.id, req.text}; }
  TextResponse paraphrase(const ParaphraseRequest& req) override { return {req.id, req.text}; }
  ScoresResponse score(const ScoreRequest& req) override {
    return {req.id, std::vector<double>(req.candidates.size(), 1.0)};
  }
  MetricResponse metric(const MetricRequest& req) override { return {req.id, 1.0}; }
  std::string describe() const override { return "stub:echo"; }
};

class FixedTextBackend : public Backend {
public:
  explicit FixedTextBackend(std::string text) : text_(std::move(text)) {}
  TextResponse translate(const TranslateRequest& req) override { return {req.id, text_}; }
  TextResponse paraphrase(const ParaphraseRequest& req) override { return {req.id, text_}; }
  ScoresResponse score(const ScoreRequest& req) override {
    return {req.id, std::vector<double>(req.candidates.size(), 0.0)};
  }
  MetricResponse metric(const MetricRequest& req) override { return {req.id, 0.0}; }
  std::string describe() const override { return "stub:fixed:" + text_; }

private:
  std::string text_;
};

class ConstantScoreBackend : public Backend {
public:
  explicit ConstantScoreBackend(double value) : value_(value) {}
  TextResponse translate(const TranslateRequest& req) override { return {req.id, req.text}; }
  TextResponse paraphrase(const ParaphraseRequest& req) override { return {req.id, req.text}; }
  ScoresResponse score(const ScoreRequest& req) override {
    return {req.id, std::vector<double>(req.candidates.size(), value_)};
  }
  MetricResponse metric(const MetricRequest& req) override { return {req.id, value_}; }
  std::string describe() const override { return "stub:constant:" + format_number(); }

private:
  std::string format_number() const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", value_);
    return buf;
  }
  double value_ = 0.0;
};

// Substitutes each codepoint with probability `rate`. Both the keep/corrupt
// decision and the replacement letter are counter-based hashes of (seed,
// text, position), so the same request always corrupts identically and the
// positions hit at rate r are a subset of those hit at any rate > r.
class CorruptingBackend : public Backend {
public:
  CorruptingBackend(double rate, std::uint64_t seed) : rate_(rate), seed_(seed) {}

  TextResponse translate(const TranslateRequest& req) override { return {req.id, corrupt(req.text)}; }
  TextResponse paraphrase(const ParaphraseRequest& req) override { return {req.id, corrupt(req.text)}; }
  ScoresResponse score(const ScoreRequest& req) override {
    return {req.id, std::vector<double>(req.candidates.size(), 1.0)};
  }
  MetricResponse metric(const MetricRequest& req) override { return {req.id, 1.0}; }
  std::string describe() const override { return "stub:corrupt"; }

private:
  std::string corrupt(const std::string& text) const {
    std::vector<char32_t> cps = decode_utf8(text);
    std::uint64_t base = fnv1a64(text, splitmix64(seed_));
    for (std::size_t i = 0; i < cps.size(); ++i) {
      std::uint64_t pos_bits = splitmix64(base + 2 * i);
      double u = static_cast<double>(pos_bits >> 11) * 0x1.0p-53;
      if (u >= rate_) continue;
      std::uint64_t rep_bits = splitmix64(base + 2 * i + 1);
      char32_t rep = static_cast<char32_t>(kCorruptAlphabet[rep_bits % kCorruptAlphabet.size()]);
      cps[i] = (rep == cps[i]) ? U'#' : rep;
    }
    return encode_utf8(cps);
  }

  double rate_ = 0.0;
  std::uint64_t seed_ = 0;
};

json decode_to_json(const DecodeParams& p) {
  json j;
  j["beam_size"] = p.beam_size;
  j["temperature"] = p.temperature;
  j["sample_seed"] = p.sample_seed;
  return j;
}

class HttpBackend : public Backend {
public:
  HttpBackend(std::string base_url, std::string token, int timeout_ms)
      : base_url_(std::move(base_url)), token_(std::move(token)), timeout_ms_(timeout_ms) {}

  TextResponse translate(const TranslateRequest& req) override {
    json body;
    body["id"] = req.id;
    body["text"] = req.text;
    body["src"] = std::string(req.src.code());
    body["tgt"] = std::string(req.tgt.code());
    body["decode"] = decode_to_json(req.decode);
    json resp = post("/translate", body);
    return {expect_id(resp, req.id), detail::get_string(resp, "text", "translate response")};
  }

  TextResponse paraphrase(const ParaphraseRequest& req) override {
    json body;
    body["id"] = req.id;
    body["text"] = req.text;
    body["lang"] = std::string(req.lang.code());
    body["decode"] = decode_to_json(req.decode);
    json resp = post("/paraphrase", body);
    return {expect_id(resp, req.id), detail::get_string(resp, "text", "paraphrase response")};
  }

  ScoresResponse score(const ScoreRequest& req) override {
    json body;
    body["id"] = req.id;
    body["src_text"] = req.src_text;
    body["candidates"] = req.candidates;
    json resp = post("/score", body);
    const json& scores = detail::require_field(resp, "scores", "score response");
    if (!scores.is_array()) throw Error(ErrorKind::MalformedResponse, "scores must be an array");
    ScoresResponse out;
    out.request_id = expect_id(resp, req.id);
    for (const auto& s : scores) {
      if (!s.is_number()) throw Error(ErrorKind::MalformedResponse, "score entries must be numbers");
      out.scores.push_back(s.get<double>());
    }
    // Arity is checked by the caller so a short list is reported the same way
    // for every backend kind.
    return out;
  }

  MetricResponse metric(const MetricRequest& req) override {
    json body;
    body["id"] = req.id;
    body["src_text"] = req.src_text;
    body["hypothesis"] = req.hypothesis;
    body["reference"] = req.reference.has_value() ? json(*req.reference) : json(nullptr);
    json resp = post("/metric", body);
    return {expect_id(resp, req.id), detail::get_number(resp, "score", "metric response")};
  }

  std::string describe() const override { return "http:" + base_url_; }

private:
  static std::string expect_id(const json& resp, const std::string& want) {
    std::string got = detail::get_string(resp, "request_id", "service response");
    if (got != want) {
      throw Error(ErrorKind::MalformedResponse,
                  "response id '" + got + "' does not match request id '" + want + "'");
    }
    return got;
  }

  json post(const std::string& path, const json& body) {
    httplib::Client client(base_url_);
    client.set_connection_timeout(0, timeout_ms_ * 1000);
    client.set_read_timeout(0, timeout_ms_ * 1000);
    httplib::Headers headers;
    if (!token_.empty()) headers.emplace("X-Auth-Token", token_);
    auto result = client.Post(path, headers, body.dump() + "\n", "application/json");
    if (!result) throw Error(ErrorKind::Timeout, "no response from " + base_url_ + path);
    if (result->status != 200) {
      Error err(ErrorKind::BackendError, base_url_ + path + " returned status " + std::to_string(result->status));
      err.status = result->status;
      throw err;
    }
    // The contract is one JSON object on one line; tolerate a trailing newline.
    std::string line = result->body;
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
    if (line.find('\n') != std::string::npos) {
      throw Error(ErrorKind::MalformedResponse, "expected a single JSON line from " + path);
    }
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw Error(ErrorKind::MalformedResponse, "response from " + path + " is not a JSON object");
    }
    return j;
  }

  std::string base_url_;
  std::string token_;
  int timeout_ms_ = 5000;
};

} // namespace

std::unique_ptr<Backend> make_stub_backend(const std::string& spec) {
  if (spec == "echo") return std::make_unique<EchoBackend>();
  if (spec.rfind("fixed:", 0) == 0) return std::make_unique<FixedTextBackend>(spec.substr(6));
  if (spec.rfind("constant:", 0) == 0) {
    try {
      return std::make_unique<ConstantScoreBackend>(std::stod(spec.substr(9)));
    } catch (const std::exception&) {
      throw Error(ErrorKind::ConfigError, "bad constant stub value in '" + spec + "'");
    }
  }
  if (spec.rfind("corrupt:", 0) == 0) {
    std::string rest = spec.substr(8);
    auto colon = rest.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorKind::ConfigError, "corrupt stub needs '<rate>:<seed>', got '" + spec + "'");
    }
    try {
      double rate = std::stod(rest.substr(0, colon));
      std::uint64_t seed = std::stoull(rest.substr(colon + 1));
      if (rate < 0.0 || rate > 1.0) throw Error(ErrorKind::ConfigError, "corrupt rate must be in [0, 1]");
      return std::make_unique<CorruptingBackend>(rate, seed);
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw Error(ErrorKind::ConfigError, "bad corrupt stub spec '" + spec + "'");
    }
  }
  throw Error(ErrorKind::ConfigError, "unknown stub spec '" + spec + "'");
}

std::unique_ptr<Backend> make_http_backend(const std::string& base_url, const std::string& token,
                                           int timeout_ms) {
  return std::make_unique<HttpBackend>(base_url, token, timeout_ms);
}

class InFlightGate {
public:
  explicit InFlightGate(int max_in_flight) : sem_(max_in_flight > 0 ? max_in_flight : 1) {}

  struct Pass {
    explicit Pass(InFlightGate& gate) : gate_(gate) { gate_.sem_.acquire(); }
    ~Pass() { gate_.sem_.release(); }
    Pass(const Pass&) = delete;
    Pass& operator=(const Pass&) = delete;
    InFlightGate& gate_;
  };

private:
  friend struct Pass;
  std::counting_semaphore<4096> sem_;
};

ServiceClient::ServiceClient(std::shared_ptr<Backend> backend, RetryPolicy policy, int max_in_flight)
    : backend_(std::move(backend)), policy_(policy), gate_(std::make_shared<InFlightGate>(max_in_flight)) {
  if (policy_.max_attempts < 1) policy_.max_attempts = 1;
}

template <typename Fn>
auto ServiceClient::with_retries(Fn&& fn) const {
  InFlightGate::Pass pass(*gate_);
  for (int attempt = 1;; ++attempt) {
    try {
      return fn();
    } catch (Error& e) {
      bool retryable = e.kind() == ErrorKind::Timeout || e.kind() == ErrorKind::BackendError;
      if (!retryable || attempt >= policy_.max_attempts) {
        e.attempts = attempt;
        throw;
      }
      if (policy_.backoff_ms > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(policy_.backoff_ms));
      }
    }
  }
}

TextResponse ServiceClient::translate(const TranslateRequest& req) const {
  return with_retries([&] { return backend_->translate(req); });
}

TextResponse ServiceClient::paraphrase(const ParaphraseRequest& req) const {
  return with_retries([&] { return backend_->paraphrase(req); });
}

ScoresResponse ServiceClient::score(const ScoreRequest& req) const {
  return with_retries([&] { return backend_->score(req); });
}

MetricResponse ServiceClient::metric(const MetricRequest& req) const {
  return with_retries([&] { return backend_->metric(req); });
}

} // namespace seedline
