#include "doctest.h"

#include <cmath>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "seedline/bpe.hpp"
#include "seedline/error.hpp"
#include "seedline/reward.hpp"
#include "seedline/rng.hpp"
#include "seedline/service.hpp"
#include "seedline/utf8.hpp"

#include "test_support.hpp"

using namespace seedline;

namespace {

ServiceClient stub_client(const std::string& spec) {
  return ServiceClient(make_stub_backend(spec), RetryPolicy{1, 0}, 2);
}

class FailBackend : public Backend {
public:
  explicit FailBackend(std::set<std::string> bad_ids) : bad_ids_(std::move(bad_ids)) {}
  TextResponse translate(const TranslateRequest& req) override {
    fail_if_bad(req.id);
    return {req.id, req.text};
  }
  TextResponse paraphrase(const ParaphraseRequest& req) override {
    fail_if_bad(req.id);
    return {req.id, req.text};
  }
  ScoresResponse score(const ScoreRequest& req) override {
    fail_if_bad(req.id);
    return {req.id, std::vector<double>(req.candidates.size(), 1.0)};
  }
  MetricResponse metric(const MetricRequest& req) override { return {req.id, 1.0}; }
  std::string describe() const override { return "fail-on-ids"; }

private:
  void fail_if_bad(const std::string& id) const {
    if (bad_ids_.count(id) > 0) throw Error(ErrorKind::BackendError, "refused " + id);
  }
  std::set<std::string> bad_ids_;
};

// Echoes translations while recording the decode seeds it was handed.
class SeedRecordingBackend : public Backend {
public:
  TextResponse translate(const TranslateRequest& req) override {
    seeds.push_back(req.decode.sample_seed);
    return {req.id, req.text};
  }
  TextResponse paraphrase(const ParaphraseRequest& req) override { return {req.id, req.text}; }
  ScoresResponse score(const ScoreRequest& req) override {
    return {req.id, std::vector<double>(req.candidates.size(), 1.0)};
  }
  MetricResponse metric(const MetricRequest& req) override { return {req.id, 1.0}; }
  std::string describe() const override { return "seed-recorder"; }

  std::vector<std::uint64_t> seeds;
};

class WrongArityBackend : public Backend {
public:
  TextResponse translate(const TranslateRequest& req) override { return {req.id, req.text}; }
  TextResponse paraphrase(const ParaphraseRequest& req) override { return {req.id, req.text}; }
  ScoresResponse score(const ScoreRequest& req) override {
    return {req.id, std::vector<double>(req.candidates.size() + 1, 0.5)};
  }
  MetricResponse metric(const MetricRequest& req) override { return {req.id, 0.5}; }
  std::string describe() const override { return "wrong-arity"; }
};

std::string random_ascii(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len) {
  std::size_t len = min_len + next_below(rng, max_len - min_len + 1);
  std::string out;
  for (std::size_t i = 0; i < len; ++i) {
    out += static_cast<char>('a' + next_below(rng, 26));
  }
  return out;
}

} // namespace

TEST_CASE("chr_ngram_similarity matches hand-worked values") {
  // n=1: overlap 2 of 3 either side -> F2 = 2/3; n=2: overlap 1 of 2 -> 1/2.
  CHECK(reward::chr_ngram_similarity("abc", "abd", 2) == doctest::Approx(7.0 / 12.0).epsilon(1e-12));

  // Multiset counting: repeated grams contribute min(run, run).
  CHECK(reward::chr_ngram_similarity("aa", "aaa", 2) == doctest::Approx(40.0 / 63.0).epsilon(1e-12));

  CHECK(reward::chr_ngram_similarity("hello", "hello") == doctest::Approx(1.0));
  CHECK(reward::chr_ngram_similarity("aaa", "bbb") == 0.0);
  CHECK(reward::chr_ngram_similarity("a", "") == 0.0);
  CHECK_THROWS_AS(reward::chr_ngram_similarity("", ""), Error);
}

TEST_CASE("similarity treats codepoints, not bytes") {
  // Identical multi-byte strings are exact matches.
  CHECK(reward::chr_ngram_similarity("你好世界", "你好世界") == doctest::Approx(1.0));
  double partial = reward::chr_ngram_similarity("你好世界", "你好地球", 2);
  CHECK(partial > 0.0);
  CHECK(partial < 1.0);
}

TEST_CASE("profile-based similarity equals the direct form") {
  auto rng = make_engine(2024);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = random_ascii(rng, 0, 12);
    auto b = random_ascii(rng, 1, 12);
    auto pa = reward::build_ngram_profile(a, 4);
    auto pb = reward::build_ngram_profile(b, 4);
    double via_profiles = reward::similarity_from_profiles(pa, pb, 2.0).value;
    CHECK(via_profiles == doctest::Approx(reward::chr_ngram_similarity(a, b, 4)).epsilon(1e-12));
  }
}

TEST_CASE("similarity validates its configuration") {
  auto p2 = reward::build_ngram_profile("ab", 2);
  auto p3 = reward::build_ngram_profile("ab", 3);
  CHECK_THROWS_AS(reward::similarity_from_profiles(p2, p3), Error);
  CHECK_THROWS_AS(reward::similarity_from_profiles(p2, p2, 0.0), Error);
  CHECK_THROWS_AS(reward::build_ngram_profile("ab", 0), Error);

  auto detail = reward::similarity_from_profiles(reward::build_ngram_profile("abc", 6),
                                                 reward::build_ngram_profile("abc", 6));
  REQUIRE(detail.per_n.size() == 3); // orders 4..6 have no grams on either side
  CHECK(detail.per_n[0].first == 1);
  CHECK(detail.per_n[2].first == 3);
}

TEST_CASE("echoing both legs round trips to a perfect dual reward") {
  auto echo = stub_client("echo");
  reward::DualOptions options;
  options.request_id = "rt";
  auto [score, record] = reward::dual_reward("hello world", Lang::from_code("en"),
                                             Lang::from_code("de"), echo, echo, options);
  CHECK(score.kind == "dual");
  CHECK(score.value == 1.0);
  REQUIRE(score.components.size() == 6);
  for (const auto& [name, f] : score.components) {
    CHECK(name.front() == 'f');
    CHECK(f == 1.0);
  }
  CHECK(record.a_text == "hello world");
  CHECK(record.b_text == "hello world");
  CHECK(record.a_tilde == "hello world");
  CHECK(score.metadata.at("forward_request_id") == "rt#fwd");
  CHECK(score.metadata.at("backward_request_id") == "rt#bwd");
}

TEST_CASE("dual rewards require two distinct languages") {
  auto echo = stub_client("echo");
  CHECK_THROWS_AS(
      reward::dual_reward("text", Lang::from_code("en"), Lang::from_code("en"), echo, echo), Error);
}

TEST_CASE("dual reward tags which leg failed") {
  auto echo = stub_client("echo");
  ServiceClient failing(std::make_shared<FailBackend>(std::set<std::string>{"rt#fwd"}),
                        RetryPolicy{1, 0}, 2);
  reward::DualOptions options;
  options.request_id = "rt";
  try {
    reward::dual_reward("text", Lang::from_code("en"), Lang::from_code("de"), failing, echo,
                        options);
    FAIL("expected the forward leg to fail");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BackendError);
    CHECK(std::string(e.what()).find("forward leg failed") != std::string::npos);
  }

  ServiceClient backward_failing(std::make_shared<FailBackend>(std::set<std::string>{"rt#bwd"}),
                                 RetryPolicy{1, 0}, 2);
  try {
    reward::dual_reward("text", Lang::from_code("en"), Lang::from_code("de"), echo,
                        backward_failing, options);
    FAIL("expected the backward leg to fail");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("backward leg failed") != std::string::npos);
  }
}

TEST_CASE("heavier corruption on the backward leg lowers the dual reward") {
  auto forward = stub_client("echo");
  auto light = stub_client("corrupt:0.05:11");
  auto heavy = stub_client("corrupt:0.45:11");

  auto rng = make_engine(55);
  double light_sum = 0.0;
  double heavy_sum = 0.0;
  const int trials = 60;
  for (int i = 0; i < trials; ++i) {
    auto text = random_ascii(rng, 20, 40);
    light_sum += reward::dual_reward(text, Lang::from_code("en"), Lang::from_code("de"), forward,
                                     light)
                     .first.value;
    heavy_sum += reward::dual_reward(text, Lang::from_code("en"), Lang::from_code("de"), forward,
                                     heavy)
                     .first.value;
  }
  CHECK(heavy_sum / trials < light_sum / trials);
  CHECK(light_sum / trials > 0.5); // light corruption stays close to identity
}

TEST_CASE("preference_reward scores every candidate through the scorer") {
  auto scorer = stub_client("constant:0.75");
  auto scores = reward::preference_reward("src", {"c1", "c2", "c3"}, scorer, "req9");
  REQUIRE(scores.size() == 3);
  for (const auto& s : scores) {
    CHECK(s.kind == "preference");
    CHECK(s.value == 0.75);
    CHECK(s.metadata.at("request_id") == "req9");
  }

  CHECK_THROWS_AS(reward::preference_reward("src", {}, scorer), Error);

  ServiceClient wrong(std::make_shared<WrongArityBackend>(), RetryPolicy{1, 0}, 2);
  try {
    reward::preference_reward("src", {"c1", "c2"}, wrong);
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LengthMismatch);
  }
}

TEST_CASE("rejection_sample orders by value then by stable index") {
  std::vector<std::string> candidates = {"w", "x", "y", "z"};
  std::vector<RewardScore> scores(4);
  scores[0].value = 0.2;
  scores[1].value = 0.9;
  scores[2].value = 0.9;
  scores[3].value = 0.1;

  auto top1 = reward::rejection_sample(candidates, scores);
  REQUIRE(top1.size() == 1);
  CHECK(top1[0] == 1);

  auto top3 = reward::rejection_sample(candidates, scores, 3);
  CHECK(top3 == std::vector<std::size_t>{1, 2, 0});

  CHECK_THROWS_AS(reward::rejection_sample(candidates, scores, 0), Error);
  CHECK_THROWS_AS(reward::rejection_sample(candidates, scores, 5), Error);
  scores.pop_back();
  CHECK_THROWS_AS(reward::rejection_sample(candidates, scores, 1), Error);
}

TEST_CASE("assemble_rollout_batch gathers dual-scored rollouts per query") {
  auto vocab = bpe::train_bpe({"seed"}, 256 + bpe::default_special_tokens().size());
  auto echo = stub_client("echo");

  std::vector<reward::RolloutQuery> queries(2);
  queries[0].id = "q1";
  queries[0].src_text = "hello";
  queries[0].src_lang = Lang::from_code("en");
  queries[0].tgt_lang = Lang::from_code("de");
  queries[1].id = "q2";
  queries[1].src_text = "worlds";
  queries[1].src_lang = Lang::from_code("en");
  queries[1].tgt_lang = Lang::from_code("de");

  auto batch = reward::assemble_rollout_batch(queries, 2, echo, echo, vocab);
  CHECK(batch.rollouts_per_query == 2);
  REQUIRE(batch.candidates.at("q1").size() == 2);
  REQUIRE(batch.candidates.at("q2").size() == 2);
  for (const auto& [text, score] : batch.candidates.at("q1")) {
    CHECK(text == "hello");
    CHECK(score.kind == "dual");
    CHECK(score.value == 1.0);
  }
  CHECK(batch.failures.at("q1").empty());
  // 2 rollouts of 5 ascii tokens plus 2 of 6: byte-level vocab counts bytes.
  CHECK(batch.batch_token_count == 22);

  CHECK_THROWS_AS(reward::assemble_rollout_batch(queries, 0, echo, echo, vocab), Error);
}

TEST_CASE("assemble_rollout_batch advances the sample seed per rollout") {
  auto vocab = bpe::train_bpe({"seed"}, 256 + bpe::default_special_tokens().size());
  auto recorder = std::make_shared<SeedRecordingBackend>();
  ServiceClient policy(recorder, RetryPolicy{1, 0}, 2);
  auto echo = stub_client("echo");

  reward::RolloutQuery query;
  query.id = "q";
  query.src_text = "abc";
  query.src_lang = Lang::from_code("en");
  query.tgt_lang = Lang::from_code("de");

  reward::BatchOptions options;
  options.decode.sample_seed = 100;
  reward::assemble_rollout_batch({query}, 3, policy, echo, vocab, options);
  CHECK(recorder->seeds == std::vector<std::uint64_t>{100, 101, 102});
}

TEST_CASE("assemble_rollout_batch records failures and flags empty queries") {
  auto vocab = bpe::train_bpe({"seed"}, 256 + bpe::default_special_tokens().size());
  auto echo = stub_client("echo");

  reward::RolloutQuery query;
  query.id = "q1";
  query.src_text = "abc";
  query.src_lang = Lang::from_code("en");
  query.tgt_lang = Lang::from_code("de");

  // One of two rollouts fails; the batch still assembles.
  ServiceClient partial(std::make_shared<FailBackend>(std::set<std::string>{"q1#roll0"}),
                        RetryPolicy{1, 0}, 2);
  auto batch = reward::assemble_rollout_batch({query}, 2, partial, echo, vocab);
  CHECK(batch.candidates.at("q1").size() == 1);
  REQUIRE(batch.failures.at("q1").size() == 1);
  CHECK(batch.failures.at("q1")[0].find("refused q1#roll0") != std::string::npos);

  // Every rollout failing is an error, not an empty record.
  ServiceClient total(
      std::make_shared<FailBackend>(std::set<std::string>{"q1#roll0", "q1#roll1"}),
      RetryPolicy{1, 0}, 2);
  try {
    reward::assemble_rollout_batch({query}, 2, total, echo, vocab);
    FAIL("expected AllRolloutsFailed");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AllRolloutsFailed);
  }
}

TEST_CASE("assemble_rollout_batch in preference mode uses the scorer") {
  auto vocab = bpe::train_bpe({"seed"}, 256 + bpe::default_special_tokens().size());
  auto echo = stub_client("echo");
  auto scorer = stub_client("constant:0.25");

  reward::RolloutQuery query;
  query.id = "q1";
  query.src_text = "abc";
  query.src_lang = Lang::from_code("en");
  query.tgt_lang = Lang::from_code("de");

  reward::BatchOptions options;
  options.mode = reward::RewardMode::Preference;
  auto batch = reward::assemble_rollout_batch({query}, 2, echo, scorer, vocab, options);
  REQUIRE(batch.candidates.at("q1").size() == 2);
  for (const auto& [text, score] : batch.candidates.at("q1")) {
    CHECK(text == "abc");
    CHECK(score.kind == "preference");
    CHECK(score.value == 0.25);
  }

  // A scorer arity bug is a programming error and must propagate.
  ServiceClient wrong(std::make_shared<WrongArityBackend>(), RetryPolicy{1, 0}, 2);
  try {
    reward::assemble_rollout_batch({query}, 2, echo, wrong, vocab, options);
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LengthMismatch);
  }
}

TEST_CASE("rollout batches serialize one sorted line per query") {
  reward::RolloutBatch batch;
  RewardScore score;
  score.kind = "dual";
  score.value = 0.5;
  score.components["f1"] = 0.5;
  batch.candidates["qb"].emplace_back("text b", score);
  batch.candidates["qa"].emplace_back("text a", score);
  batch.failures["qa"].push_back("one failure");

  auto lines = reward::rollout_batch_to_jsonl(batch);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0].find("\"query_id\":\"qa\"") != std::string::npos);
  CHECK(lines[0].find("\"one failure\"") != std::string::npos);
  CHECK(lines[1].find("\"query_id\":\"qb\"") != std::string::npos);
  CHECK(lines[1].find("\"text\":\"text b\"") != std::string::npos);
  CHECK(lines[1].find("\"failures\":[]") != std::string::npos);
}
