#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "seedline/bpe.hpp"
#include "seedline/service.hpp"
#include "seedline/types.hpp"

namespace seedline {
namespace reward {

// Per-string n-gram index: codepoints decoded once, and for each order n the
// start offsets of all n-grams, sorted by gram content. Similarity between two
// strings is then a handful of sorted-merge intersections, which is what makes
// exhaustive all-pairs sweeps affordable.
struct NgramProfile {
  std::vector<char32_t> cps;
  int max_n = 6;
  std::vector<std::vector<std::uint32_t>> sorted_offsets; // [n-1] -> offsets
};

NgramProfile build_ngram_profile(const std::string& text, int max_n = 6);

struct SimilarityDetail {
  double value = 0.0;
  // (n, f_score) for every order that had at least one gram on either side.
  std::vector<std::pair<int, double>> per_n;
};

SimilarityDetail similarity_from_profiles(const NgramProfile& a, const NgramProfile& b,
                                          double beta = 2.0);

double chr_ngram_similarity(const std::string& a, const std::string& b, int max_n = 6,
                            double beta = 2.0);

struct RoundTripRecord {
  std::string a_text;
  std::string b_text;
  std::string a_tilde;
  Lang src_lang = Lang::from_code("en");
  Lang tgt_lang = Lang::from_code("de");
};

struct DualOptions {
  int max_n = 6;
  double beta = 2.0;
  DecodeParams decode;
  std::string request_id; // derived from the text hash when empty
};

std::pair<RewardScore, RoundTripRecord> dual_reward(const std::string& a_text, Lang src, Lang tgt,
                                                    const ServiceClient& forward,
                                                    const ServiceClient& backward,
                                                    const DualOptions& options = {});

std::vector<RewardScore> preference_reward(const std::string& src_text,
                                           const std::vector<std::string>& candidates,
                                           const ServiceClient& scorer,
                                           const std::string& request_id = {});

std::vector<std::size_t> rejection_sample(const std::vector<std::string>& candidates,
                                          const std::vector<RewardScore>& scores, std::size_t k = 1);

enum class RewardMode { Dual, Preference };

struct RolloutQuery {
  std::string id;
  std::string src_text;
  Lang src_lang = Lang::from_code("en");
  Lang tgt_lang = Lang::from_code("de");
};

struct RolloutBatch {
  // query_id -> (candidate_text, score), rollout order preserved.
  std::map<std::string, std::vector<std::pair<std::string, RewardScore>>> candidates;
  std::map<std::string, std::vector<std::string>> failures;
  int rollouts_per_query = 1;
  std::size_t batch_token_count = 0; // candidate tokens, via the tokenizer
};

struct BatchOptions {
  RewardMode mode = RewardMode::Dual;
  int max_n = 6;
  double beta = 2.0;
  DecodeParams decode; // sample_seed is advanced per rollout
};

// `aux` is the backward translator in Dual mode and the scorer in Preference
// mode.
RolloutBatch assemble_rollout_batch(const std::vector<RolloutQuery>& queries, int rollouts_per_query,
                                    const ServiceClient& policy, const ServiceClient& aux,
                                    const bpe::BpeVocab& vocab, const BatchOptions& options = {});

std::vector<std::string> rollout_batch_to_jsonl(const RolloutBatch& batch);

} // namespace reward
} // namespace seedline
