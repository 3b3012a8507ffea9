#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "seedline/bpe.hpp"
#include "seedline/config.hpp"
#include "seedline/service.hpp"
#include "seedline/types.hpp"

namespace seedline {
namespace mono {

using QualityScorer = std::function<QualityTier(const Document&)>;

// Default scorer: length and symbol-ratio heuristic. Short or symbol-heavy
// text tiers Low, long clean text High, the rest Medium. Thresholds are an
// acknowledged invention, tunable via config.
QualityScorer heuristic_scorer(const QualityThresholds& thresholds);

std::vector<Document> tier_documents(const std::vector<Document>& docs, const QualityScorer& scorer);

struct RouteResult {
  std::vector<Document> retained;  // High, untouched
  std::vector<Document> rewritten; // Medium, text replaced by the paraphraser
  long dropped_count = 0;          // Low
  long paraphrase_failures = 0;    // docs kept verbatim after exhausted retries
};

RouteResult route_by_tier(const std::vector<Document>& docs, const ServiceClient& paraphraser);

// Tier + route repeatedly until tiers stop changing, capped at `iterations`.
struct QualityLoopResult {
  std::vector<Document> docs;
  int iterations_run = 0;
  long dropped_total = 0;
};

QualityLoopResult quality_loop(std::vector<Document> docs, const QualityScorer& scorer,
                               const ServiceClient& paraphraser, int iterations);

std::size_t unique_tag_count(const std::vector<Document>& docs);

struct BalanceSpec {
  double max_tag_share = 0.5;
  std::map<Lang, double> per_language_token_weights;
};

// Maximal subset in which each tag's document count stays within
// ceil(max_tag_share * selected_count). The cap binds only when the
// selection spans at least two distinct tags; removal among over-cap tags
// is uniform under the seeded generator.
std::vector<Document> balance_topics(const std::vector<Document>& docs, const BalanceSpec& spec,
                                     std::uint64_t seed);

// Drops every document carrying one of the excluded tags.
std::vector<Document> filter_excluded_tags(const std::vector<Document>& docs,
                                           const std::vector<std::string>& exclude);

struct LanguageShare {
  long token_count = 0;
  double proportion = 0.0;
};

std::map<Lang, LanguageShare> language_token_report(const std::vector<Document>& docs,
                                                    const bpe::BpeVocab& vocab);

} // namespace mono
} // namespace seedline
