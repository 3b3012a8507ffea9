#include "seedline/reward.hpp"

#include <algorithm>
#include <numeric>

#include "seedline/error.hpp"
#include "seedline/hash.hpp"
#include "json_detail.hpp"
#include "seedline/utf8.hpp"

namespace seedline {
namespace reward {

namespace {

int compare_grams(const char32_t* a, const char32_t* b, int n) {
  return std::char_traits<char32_t>::compare(a, b, static_cast<std::size_t>(n));
}

// Multiset intersection size of two sorted offset arrays (equal runs counted
// as min of the run lengths).
std::size_t intersection_size(const NgramProfile& pa, const NgramProfile& pb, int n) {
  const auto& oa = pa.sorted_offsets[static_cast<std::size_t>(n - 1)];
  const auto& ob = pb.sorted_offsets[static_cast<std::size_t>(n - 1)];
  const char32_t* base_a = pa.cps.data();
  const char32_t* base_b = pb.cps.data();
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t overlap = 0;
  while (i < oa.size() && j < ob.size()) {
    int cmp = compare_grams(base_a + oa[i], base_b + ob[j], n);
    if (cmp < 0) {
      ++i;
    } else if (cmp > 0) {
      ++j;
    } else {
      std::size_t ri = i + 1;
      while (ri < oa.size() && compare_grams(base_a + oa[ri], base_a + oa[i], n) == 0) ++ri;
      std::size_t rj = j + 1;
      while (rj < ob.size() && compare_grams(base_b + ob[rj], base_b + ob[j], n) == 0) ++rj;
      overlap += std::min(ri - i, rj - j);
      i = ri;
      j = rj;
    }
  }
  return overlap;
}

std::string leg_tagged(const char* leg, const Error& e) {
  return std::string(leg) + " leg failed: " + e.what();
}

detail::json score_to_json(const RewardScore& score) {
  detail::json doc;
  doc["kind"] = score.kind;
  doc["value"] = score.value;
  doc["components"] = detail::json::object();
  for (const auto& [key, value] : score.components) doc["components"][key] = value;
  doc["metadata"] = detail::json::object();
  for (const auto& [key, value] : score.metadata) doc["metadata"][key] = value;
  return doc;
}

} // namespace

NgramProfile build_ngram_profile(const std::string& text, int max_n) {
  if (max_n < 1) throw Error(ErrorKind::ConfigError, "max_n must be at least 1");
  NgramProfile profile;
  profile.max_n = max_n;
  profile.cps = decode_utf8(text);
  profile.sorted_offsets.resize(static_cast<std::size_t>(max_n));
  const char32_t* base = profile.cps.data();
  auto len = profile.cps.size();
  for (int n = 1; n <= max_n; ++n) {
    auto& offsets = profile.sorted_offsets[static_cast<std::size_t>(n - 1)];
    if (len >= static_cast<std::size_t>(n)) {
      offsets.resize(len - static_cast<std::size_t>(n) + 1);
      std::iota(offsets.begin(), offsets.end(), 0u);
      std::sort(offsets.begin(), offsets.end(), [base, n](std::uint32_t x, std::uint32_t y) {
        return compare_grams(base + x, base + y, n) < 0;
      });
    }
  }
  return profile;
}

SimilarityDetail similarity_from_profiles(const NgramProfile& a, const NgramProfile& b, double beta) {
  if (a.max_n != b.max_n) {
    throw Error(ErrorKind::ConfigError, "profiles were built with different max_n");
  }
  if (!(beta > 0.0)) throw Error(ErrorKind::ConfigError, "beta must be positive");

  SimilarityDetail detail;
  double sum = 0.0;
  int used = 0;
  double beta2 = beta * beta;
  for (int n = 1; n <= a.max_n; ++n) {
    auto ca = a.sorted_offsets[static_cast<std::size_t>(n - 1)].size();
    auto cb = b.sorted_offsets[static_cast<std::size_t>(n - 1)].size();
    if (ca == 0 && cb == 0) continue;
    double overlap = ca == 0 || cb == 0 ? 0.0 : static_cast<double>(intersection_size(a, b, n));
    double precision = ca == 0 ? 0.0 : overlap / static_cast<double>(ca);
    double recall = cb == 0 ? 0.0 : overlap / static_cast<double>(cb);
    double f = 0.0;
    if (precision + recall > 0.0) {
      f = (1.0 + beta2) * precision * recall / (beta2 * precision + recall);
    }
    detail.per_n.emplace_back(n, f);
    sum += f;
    ++used;
  }
  if (used == 0) throw Error(ErrorKind::BothEmpty, "both strings are empty");
  detail.value = sum / used;
  return detail;
}

double chr_ngram_similarity(const std::string& a, const std::string& b, int max_n, double beta) {
  auto pa = build_ngram_profile(a, max_n);
  auto pb = build_ngram_profile(b, max_n);
  return similarity_from_profiles(pa, pb, beta).value;
}

std::pair<RewardScore, RoundTripRecord> dual_reward(const std::string& a_text, Lang src, Lang tgt,
                                                    const ServiceClient& forward,
                                                    const ServiceClient& backward,
                                                    const DualOptions& options) {
  if (src == tgt) {
    throw Error(ErrorKind::SameLanguage, "round trip needs two distinct languages");
  }
  std::string base_id =
      options.request_id.empty() ? "dual-" + hex64(fnv1a64(a_text)) : options.request_id;

  TranslateRequest fwd;
  fwd.id = base_id + "#fwd";
  fwd.text = a_text;
  fwd.src = src;
  fwd.tgt = tgt;
  fwd.decode = options.decode;
  TextResponse b;
  try {
    b = forward.translate(fwd);
  } catch (const Error& e) {
    throw Error(e.kind(), leg_tagged("forward", e));
  }

  TranslateRequest bwd;
  bwd.id = base_id + "#bwd";
  bwd.text = b.text;
  bwd.src = tgt;
  bwd.tgt = src;
  bwd.decode = options.decode;
  TextResponse a_tilde;
  try {
    a_tilde = backward.translate(bwd);
  } catch (const Error& e) {
    throw Error(e.kind(), leg_tagged("backward", e));
  }

  auto pa = build_ngram_profile(a_text, options.max_n);
  auto pt = build_ngram_profile(a_tilde.text, options.max_n);
  auto detail = similarity_from_profiles(pa, pt, options.beta);

  RewardScore score;
  score.kind = "dual";
  score.value = detail.value;
  for (const auto& [n, f] : detail.per_n) score.components["f" + std::to_string(n)] = f;
  score.metadata["forward_request_id"] = fwd.id;
  score.metadata["backward_request_id"] = bwd.id;

  RoundTripRecord record;
  record.a_text = a_text;
  record.b_text = b.text;
  record.a_tilde = a_tilde.text;
  record.src_lang = src;
  record.tgt_lang = tgt;
  return {std::move(score), std::move(record)};
}

std::vector<RewardScore> preference_reward(const std::string& src_text,
                                           const std::vector<std::string>& candidates,
                                           const ServiceClient& scorer,
                                           const std::string& request_id) {
  if (candidates.empty()) {
    throw Error(ErrorKind::EmptyInput, "preference reward needs at least one candidate");
  }
  ScoreRequest req;
  req.id = request_id.empty() ? "pref-" + hex64(fnv1a64(src_text)) : request_id;
  req.src_text = src_text;
  req.candidates = candidates;
  auto resp = scorer.score(req);
  if (resp.scores.size() != candidates.size()) {
    throw Error(ErrorKind::LengthMismatch, "backend returned " + std::to_string(resp.scores.size()) +
                                               " scores for " + std::to_string(candidates.size()) +
                                               " candidates");
  }
  std::vector<RewardScore> out;
  out.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    RewardScore score;
    score.kind = "preference";
    score.value = resp.scores[i];
    score.metadata["request_id"] = req.id;
    out.push_back(std::move(score));
  }
  return out;
}

std::vector<std::size_t> rejection_sample(const std::vector<std::string>& candidates,
                                          const std::vector<RewardScore>& scores, std::size_t k) {
  if (candidates.size() != scores.size()) {
    throw Error(ErrorKind::ArityMismatch, std::to_string(candidates.size()) + " candidates vs " +
                                              std::to_string(scores.size()) + " scores");
  }
  if (k < 1 || k > candidates.size()) {
    throw Error(ErrorKind::ArityMismatch,
                "k=" + std::to_string(k) + " with " + std::to_string(candidates.size()) + " candidates");
  }
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (scores[x].value != scores[y].value) return scores[x].value > scores[y].value;
    return x < y;
  });
  order.resize(k);
  return order;
}

RolloutBatch assemble_rollout_batch(const std::vector<RolloutQuery>& queries, int rollouts_per_query,
                                    const ServiceClient& policy, const ServiceClient& aux,
                                    const bpe::BpeVocab& vocab, const BatchOptions& options) {
  if (rollouts_per_query < 1) {
    throw Error(ErrorKind::ConfigError, "rollouts_per_query must be at least 1");
  }

  RolloutBatch batch;
  batch.rollouts_per_query = rollouts_per_query;

  for (const auto& query : queries) {
    std::vector<std::string> raw;
    auto& fails = batch.failures[query.id];
    for (int r = 0; r < rollouts_per_query; ++r) {
      TranslateRequest req;
      req.id = query.id + "#roll" + std::to_string(r);
      req.text = query.src_text;
      req.src = query.src_lang;
      req.tgt = query.tgt_lang;
      req.decode = options.decode;
      req.decode.sample_seed = options.decode.sample_seed + static_cast<std::uint64_t>(r);
      try {
        raw.push_back(policy.translate(req).text);
      } catch (const Error& e) {
        fails.emplace_back(e.what());
      }
    }

    auto& scored = batch.candidates[query.id];
    if (options.mode == RewardMode::Dual) {
      auto pa = build_ngram_profile(query.src_text, options.max_n);
      for (std::size_t i = 0; i < raw.size(); ++i) {
        TranslateRequest bwd;
        bwd.id = query.id + "#bwd" + std::to_string(i);
        bwd.text = raw[i];
        bwd.src = query.tgt_lang;
        bwd.tgt = query.src_lang;
        bwd.decode = options.decode;
        try {
          auto a_tilde = aux.translate(bwd);
          auto detail = similarity_from_profiles(pa, build_ngram_profile(a_tilde.text, options.max_n),
                                                 options.beta);
          RewardScore score;
          score.kind = "dual";
          score.value = detail.value;
          for (const auto& [n, f] : detail.per_n) score.components["f" + std::to_string(n)] = f;
          score.metadata["backward_request_id"] = bwd.id;
          scored.emplace_back(raw[i], std::move(score));
        } catch (const Error& e) {
          fails.emplace_back(leg_tagged("backward", e));
        }
      }
    } else {
      if (!raw.empty()) {
        try {
          auto scores = preference_reward(query.src_text, raw, aux, query.id + "#pref");
          for (std::size_t i = 0; i < raw.size(); ++i) {
            scored.emplace_back(raw[i], std::move(scores[i]));
          }
        } catch (const Error& e) {
          if (e.kind() == ErrorKind::LengthMismatch) throw;
          fails.emplace_back(e.what());
        }
      }
    }

    if (scored.empty()) {
      throw Error(ErrorKind::AllRolloutsFailed,
                  "query " + query.id + " produced no scored rollout (" +
                      std::to_string(fails.size()) + " failures)");
    }
    for (const auto& [text, score] : scored) {
      (void)score;
      batch.batch_token_count += bpe::encode(text, vocab).size();
    }
  }
  return batch;
}

std::vector<std::string> rollout_batch_to_jsonl(const RolloutBatch& batch) {
  std::vector<std::string> lines;
  for (const auto& [query_id, entries] : batch.candidates) {
    detail::json doc;
    doc["query_id"] = query_id;
    doc["candidates"] = detail::json::array();
    for (const auto& [text, score] : entries) {
      detail::json c = score_to_json(score);
      c["text"] = text;
      doc["candidates"].push_back(std::move(c));
    }
    doc["failures"] = detail::json::array();
    auto it = batch.failures.find(query_id);
    if (it != batch.failures.end()) {
      for (const auto& f : it->second) doc["failures"].push_back(f);
    }
    lines.push_back(doc.dump());
  }
  return lines;
}

} // namespace reward
} // namespace seedline
