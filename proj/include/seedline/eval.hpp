#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seedline/lang.hpp"

namespace seedline {
namespace eval {

enum class DirectionGroup { XxToEn, EnToXx, XxToZh, ZhToXx, XxToXx };

const char* to_string(DirectionGroup group);

// English-centric precedence by default: tgt=en, src=en, tgt=zh, src=zh, rest.
// chinese_centric swaps the two pivots.
DirectionGroup categorize(Lang src, Lang tgt, bool chinese_centric = false);

// Report columns, in summation order: the five FLORES groups plus WMT-25
// EN=>XX.
extern const std::array<std::string_view, 6> kColumnKeys;

// Unweighted mean of the six columns, rounded half-up to two decimals.
double aggregate_groups(const std::map<std::string, double>& columns);

struct KeyPoint {
  std::string span;
  std::string handling;

  bool operator==(const KeyPoint&) const = default;
};

enum class Style { Formal, Colloquial };

const char* to_string(Style style);
Style style_from_string(const std::string& s);

struct ChallengeItem {
  std::string id;
  Lang src_lang = Lang::from_code("en");
  std::string src_text;
  std::vector<KeyPoint> key_points;
  std::string domain_tag;
  Style style = Style::Formal;
  std::vector<Lang> target_langs;
};

std::vector<ChallengeItem> load_challenge_set(const std::string& path);
ChallengeItem challenge_from_json_line(const std::string& line);

struct HumanScore {
  std::string item_id;
  std::string direction; // "zh-es"
  std::string rater_id;
  std::optional<double> score;      // 0-4 mode
  std::optional<long> major_errors; // deduction mode
  std::optional<long> minor_errors;
};

// JSONL: item_id, direction, rater_id, and exactly one of `score` or the
// `major_errors`/`minor_errors` pair.
std::vector<HumanScore> load_human_scores(const std::string& path);

struct HumanAggregate {
  std::map<std::string, double> direction_means; // unrounded
  double overall = 0.0;                          // 2-decimal half-up
};

HumanAggregate aggregate_human(const std::vector<HumanScore>& records);

struct DeductionWeights {
  double major = 1.0;
  double minor = 0.5;
};

// Mean over items of -(majors * w_major + minors * w_minor); 0.0 when empty.
double deduction_score(const std::vector<HumanScore>& records, DeductionWeights weights = {});

struct Hypothesis {
  std::string item_id;
  std::string direction;
  std::string text;
};

std::vector<Hypothesis> load_hypotheses(const std::string& path);

struct Scorecard {
  std::string item_id;
  std::string direction;
  std::string src_text;
  std::string hypothesis;
  std::vector<KeyPoint> key_points;
  std::string domain_tag;
  Style style = Style::Formal;
};

// One worksheet per hypothesis, sorted by (item_id, direction). Hypotheses
// must reference a known item and a direction the item targets.
std::vector<Scorecard> emit_scorecards(const std::vector<ChallengeItem>& items,
                                       const std::vector<Hypothesis>& hypotheses);

std::string scorecard_to_json_line(const Scorecard& card);

struct SegmentScore {
  std::string system;
  std::string direction;   // "de-en"
  std::string segment_id;  // "flores:..." or "wmt25:..."
  std::string metric;      // "bleurt" | "comet" | ...
  double score = 0.0;
};

// Five tab-separated fields per line: system, direction, segment_id, metric,
// score.
std::vector<SegmentScore> parse_segment_scores(const std::string& path);

// Per-column means for one system's segments. All segments must share one
// metric (MixedMetrics otherwise); wmt25 segments must run EN=>XX.
std::map<std::string, double> column_means(const std::vector<SegmentScore>& segments,
                                           bool chinese_centric = false);

} // namespace eval
} // namespace seedline
