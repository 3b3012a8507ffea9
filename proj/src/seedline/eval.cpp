#include "seedline/eval.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "seedline/error.hpp"
#include "json_detail.hpp"
#include "seedline/json_io.hpp"
#include "seedline/types.hpp"

namespace seedline {
namespace eval {

namespace {

const std::set<std::string> kChallengeTargets = {"es", "de", "fr", "ru", "ar", "pt", "it"};

std::pair<Lang, Lang> parse_direction(const std::string& direction) {
  auto dash = direction.find('-');
  if (dash == std::string::npos || dash == 0 || dash + 1 >= direction.size()) {
    throw Error(ErrorKind::SchemaViolation, "direction must look like 'de-en', got '" + direction + "'");
  }
  return {Lang::from_code(direction.substr(0, dash)), Lang::from_code(direction.substr(dash + 1))};
}

Error at_line(const Error& e, long line_number) {
  Error out(e.kind(), std::string(e.what()));
  out.line_number = line_number;
  return out;
}

ChallengeItem challenge_from_json(const detail::json& doc) {
  detail::require_object(doc, "challenge item");
  detail::check_keys(doc, {"id", "src_lang", "src_text", "key_points", "domain_tag", "style",
                           "target_langs"},
                     "challenge item");
  ChallengeItem item;
  item.id = detail::get_string(doc, "id", "challenge item");
  auto src = detail::get_string(doc, "src_lang", "challenge item");
  if (src != "en" && src != "zh") {
    throw Error(ErrorKind::SchemaViolation, "challenge src_lang must be en or zh, got '" + src + "'");
  }
  item.src_lang = Lang::from_code(src);
  item.src_text = detail::get_string(doc, "src_text", "challenge item");
  const auto& points = detail::require_field(doc, "key_points", "challenge item");
  if (!points.is_array() || points.empty()) {
    throw Error(ErrorKind::SchemaViolation, "key_points must be a non-empty array");
  }
  for (const auto& point : points) {
    detail::require_object(point, "key point");
    detail::check_keys(point, {"span", "handling"}, "key point");
    KeyPoint kp;
    kp.span = detail::get_string(point, "span", "key point");
    kp.handling = detail::get_string(point, "handling", "key point");
    if (kp.span.empty()) throw Error(ErrorKind::SchemaViolation, "key point span must be non-empty");
    item.key_points.push_back(std::move(kp));
  }
  item.domain_tag = detail::get_string(doc, "domain_tag", "challenge item");
  item.style = style_from_string(detail::get_string(doc, "style", "challenge item"));
  const auto& targets = detail::require_field(doc, "target_langs", "challenge item");
  if (!targets.is_array()) throw Error(ErrorKind::SchemaViolation, "target_langs must be an array");
  for (const auto& t : targets) {
    if (!t.is_string()) throw Error(ErrorKind::SchemaViolation, "target_langs entries must be strings");
    auto code = t.get<std::string>();
    if (kChallengeTargets.count(code) == 0) {
      throw Error(ErrorKind::SchemaViolation, "'" + code + "' is not a challenge target language");
    }
    item.target_langs.push_back(Lang::from_code(code));
  }
  return item;
}

} // namespace

const char* to_string(DirectionGroup group) {
  switch (group) {
    case DirectionGroup::XxToEn: return "xx_to_en";
    case DirectionGroup::EnToXx: return "en_to_xx";
    case DirectionGroup::XxToZh: return "xx_to_zh";
    case DirectionGroup::ZhToXx: return "zh_to_xx";
    case DirectionGroup::XxToXx: return "xx_to_xx";
  }
  throw Error(ErrorKind::SchemaViolation, "bad direction group value");
}

DirectionGroup categorize(Lang src, Lang tgt, bool chinese_centric) {
  if (src == tgt) {
    throw Error(ErrorKind::SameLanguage, "cannot categorize " + std::string(src.code()) + "->" +
                                             std::string(tgt.code()));
  }
  Lang en = Lang::from_code("en");
  Lang zh = Lang::from_code("zh");
  Lang first = chinese_centric ? zh : en;
  Lang second = chinese_centric ? en : zh;
  auto group_for = [&](Lang pivot, bool to_pivot) {
    if (pivot == en) return to_pivot ? DirectionGroup::XxToEn : DirectionGroup::EnToXx;
    return to_pivot ? DirectionGroup::XxToZh : DirectionGroup::ZhToXx;
  };
  if (tgt == first) return group_for(first, true);
  if (src == first) return group_for(first, false);
  if (tgt == second) return group_for(second, true);
  if (src == second) return group_for(second, false);
  return DirectionGroup::XxToXx;
}

const std::array<std::string_view, 6> kColumnKeys = {
    "flores_xx_to_en", "flores_en_to_xx", "flores_xx_to_zh",
    "flores_zh_to_xx", "flores_xx_to_xx", "wmt25_en_to_xx",
};

double aggregate_groups(const std::map<std::string, double>& columns) {
  double sum = 0.0;
  for (auto key : kColumnKeys) {
    auto it = columns.find(std::string(key));
    if (it == columns.end()) {
      throw Error(ErrorKind::MissingColumn, "missing column '" + std::string(key) + "'");
    }
    sum += it->second;
  }
  return round2(sum / 6.0);
}

const char* to_string(Style style) { return style == Style::Formal ? "formal" : "colloquial"; }

Style style_from_string(const std::string& s) {
  if (s == "formal") return Style::Formal;
  if (s == "colloquial") return Style::Colloquial;
  throw Error(ErrorKind::SchemaViolation, "unknown style: " + s);
}

ChallengeItem challenge_from_json_line(const std::string& line) {
  return challenge_from_json(detail::parse_json(line));
}

std::vector<ChallengeItem> load_challenge_set(const std::string& path) {
  std::vector<ChallengeItem> items;
  long line_number = 0;
  for (const auto& line : read_lines(path)) {
    ++line_number;
    if (line.empty()) continue;
    try {
      items.push_back(challenge_from_json_line(line));
    } catch (const Error& e) {
      throw at_line(e, line_number);
    }
  }
  return items;
}

std::vector<HumanScore> load_human_scores(const std::string& path) {
  std::vector<HumanScore> out;
  long line_number = 0;
  for (const auto& line : read_lines(path)) {
    ++line_number;
    if (line.empty()) continue;
    try {
      auto doc = detail::parse_json(line);
      detail::require_object(doc, "human score");
      detail::check_keys(doc, {"item_id", "direction", "rater_id", "score", "major_errors",
                               "minor_errors"},
                         "human score");
      HumanScore rec;
      rec.item_id = detail::get_string(doc, "item_id", "human score");
      rec.direction = detail::get_string(doc, "direction", "human score");
      rec.rater_id = detail::get_string(doc, "rater_id", "human score");
      // Fields may be omitted or written as explicit nulls; both mean absent.
      auto present = [&](const char* key) { return doc.contains(key) && !doc[key].is_null(); };
      bool has_score = present("score");
      bool has_errors = present("major_errors") || present("minor_errors");
      if (has_score == has_errors) {
        throw Error(ErrorKind::SchemaViolation,
                    "record must carry either 'score' or the error counts, not both or neither");
      }
      if (has_score) {
        rec.score = detail::get_number(doc, "score", "human score");
      } else {
        rec.major_errors = detail::get_integer(doc, "major_errors", "human score");
        rec.minor_errors = detail::get_integer(doc, "minor_errors", "human score");
      }
      out.push_back(std::move(rec));
    } catch (const Error& e) {
      throw at_line(e, line_number);
    }
  }
  return out;
}

HumanAggregate aggregate_human(const std::vector<HumanScore>& records) {
  if (records.empty()) throw Error(ErrorKind::EmptyInput, "no human scores to aggregate");
  std::map<std::string, std::pair<double, long>> sums;
  for (const auto& rec : records) {
    if (!rec.score.has_value() || rec.major_errors.has_value() || rec.minor_errors.has_value()) {
      throw Error(ErrorKind::MixedModes, "record " + rec.item_id + " is not a 0-4 score");
    }
    if (*rec.score < 0.0 || *rec.score > 4.0) {
      throw Error(ErrorKind::SchemaViolation, "score out of [0,4] for item " + rec.item_id);
    }
    auto& [sum, n] = sums[rec.direction];
    sum += *rec.score;
    ++n;
  }
  HumanAggregate agg;
  double total = 0.0;
  for (const auto& [direction, acc] : sums) {
    double mean = acc.first / static_cast<double>(acc.second);
    agg.direction_means[direction] = mean;
    total += mean;
  }
  agg.overall = round2(total / static_cast<double>(agg.direction_means.size()));
  return agg;
}

double deduction_score(const std::vector<HumanScore>& records, DeductionWeights weights) {
  if (!(weights.major > 0.0) || !(weights.minor > 0.0)) {
    throw Error(ErrorKind::ConfigError, "deduction weights must be positive");
  }
  if (records.empty()) return 0.0;
  std::map<std::string, double> per_item;
  for (const auto& rec : records) {
    if (rec.score.has_value() || !rec.major_errors.has_value() || !rec.minor_errors.has_value()) {
      throw Error(ErrorKind::MixedModes, "record " + rec.item_id + " is not a deduction record");
    }
    if (*rec.major_errors < 0 || *rec.minor_errors < 0) {
      throw Error(ErrorKind::SchemaViolation, "negative error count for item " + rec.item_id);
    }
    per_item[rec.item_id] -= static_cast<double>(*rec.major_errors) * weights.major +
                             static_cast<double>(*rec.minor_errors) * weights.minor;
  }
  double total = 0.0;
  for (const auto& [item, deduction] : per_item) total += deduction;
  return total / static_cast<double>(per_item.size());
}

std::vector<Hypothesis> load_hypotheses(const std::string& path) {
  std::vector<Hypothesis> out;
  long line_number = 0;
  for (const auto& line : read_lines(path)) {
    ++line_number;
    if (line.empty()) continue;
    try {
      auto doc = detail::parse_json(line);
      detail::require_object(doc, "hypothesis");
      detail::check_keys(doc, {"item_id", "direction", "text"}, "hypothesis");
      Hypothesis hyp;
      hyp.item_id = detail::get_string(doc, "item_id", "hypothesis");
      hyp.direction = detail::get_string(doc, "direction", "hypothesis");
      hyp.text = detail::get_string(doc, "text", "hypothesis");
      out.push_back(std::move(hyp));
    } catch (const Error& e) {
      throw at_line(e, line_number);
    }
  }
  return out;
}

std::vector<Scorecard> emit_scorecards(const std::vector<ChallengeItem>& items,
                                       const std::vector<Hypothesis>& hypotheses) {
  std::map<std::string, const ChallengeItem*> by_id;
  for (const auto& item : items) by_id[item.id] = &item;

  std::vector<Scorecard> cards;
  for (const auto& hyp : hypotheses) {
    auto it = by_id.find(hyp.item_id);
    if (it == by_id.end()) {
      throw Error(ErrorKind::SchemaViolation, "hypothesis references unknown item " + hyp.item_id);
    }
    const ChallengeItem& item = *it->second;
    auto [src, tgt] = parse_direction(hyp.direction);
    if (src != item.src_lang) {
      throw Error(ErrorKind::DirectionMismatch, "item " + item.id + " starts from " +
                                                    std::string(item.src_lang.code()) + ", not " +
                                                    std::string(src.code()));
    }
    if (std::find(item.target_langs.begin(), item.target_langs.end(), tgt) == item.target_langs.end()) {
      throw Error(ErrorKind::DirectionMismatch,
                  "item " + item.id + " does not target " + std::string(tgt.code()));
    }
    Scorecard card;
    card.item_id = item.id;
    card.direction = hyp.direction;
    card.src_text = item.src_text;
    card.hypothesis = hyp.text;
    card.key_points = item.key_points;
    card.domain_tag = item.domain_tag;
    card.style = item.style;
    cards.push_back(std::move(card));
  }
  std::sort(cards.begin(), cards.end(), [](const Scorecard& a, const Scorecard& b) {
    if (a.item_id != b.item_id) return a.item_id < b.item_id;
    return a.direction < b.direction;
  });
  return cards;
}

std::string scorecard_to_json_line(const Scorecard& card) {
  detail::json doc;
  doc["item_id"] = card.item_id;
  doc["direction"] = card.direction;
  doc["src_text"] = card.src_text;
  doc["hypothesis"] = card.hypothesis;
  doc["domain_tag"] = card.domain_tag;
  doc["style"] = to_string(card.style);
  doc["key_points"] = detail::json::array();
  for (const auto& kp : card.key_points) {
    doc["key_points"].push_back({{"span", kp.span}, {"handling", kp.handling}});
  }
  doc["rating"] = nullptr; // raters fill this in offline
  return doc.dump();
}

std::vector<SegmentScore> parse_segment_scores(const std::string& path) {
  std::vector<SegmentScore> out;
  long line_number = 0;
  for (const auto& line : read_lines(path)) {
    ++line_number;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      auto tab = line.find('\t', start);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (fields.size() != 5) {
      Error e(ErrorKind::SchemaViolation,
              "expected 5 tab-separated fields, got " + std::to_string(fields.size()));
      e.line_number = line_number;
      throw e;
    }
    SegmentScore seg;
    seg.system = fields[0];
    seg.direction = fields[1];
    seg.segment_id = fields[2];
    seg.metric = fields[3];
    const char* first = fields[4].data();
    const char* last = first + fields[4].size();
    auto [ptr, ec] = std::from_chars(first, last, seg.score);
    if (ec != std::errc() || ptr != last) {
      Error e(ErrorKind::SchemaViolation, "bad score '" + fields[4] + "'");
      e.line_number = line_number;
      throw e;
    }
    if (seg.system.empty() || seg.direction.empty() || seg.segment_id.empty() || seg.metric.empty()) {
      Error e(ErrorKind::SchemaViolation, "empty field in segment score row");
      e.line_number = line_number;
      throw e;
    }
    out.push_back(std::move(seg));
  }
  return out;
}

std::map<std::string, double> column_means(const std::vector<SegmentScore>& segments,
                                           bool chinese_centric) {
  if (segments.empty()) throw Error(ErrorKind::EmptyInput, "no segment scores");
  const std::string& metric = segments.front().metric;
  std::map<std::string, std::pair<double, long>> sums;
  for (const auto& seg : segments) {
    if (seg.metric != metric) {
      throw Error(ErrorKind::MixedMetrics,
                  "segments mix metrics '" + metric + "' and '" + seg.metric + "'");
    }
    auto colon = seg.segment_id.find(':');
    std::string benchmark = colon == std::string::npos ? "" : seg.segment_id.substr(0, colon);
    auto [src, tgt] = parse_direction(seg.direction);
    std::string column;
    if (benchmark == "flores") {
      column = "flores_" + std::string(to_string(categorize(src, tgt, chinese_centric)));
    } else if (benchmark == "wmt25") {
      if (src != Lang::from_code("en")) {
        throw Error(ErrorKind::DirectionMismatch,
                    "wmt25 segment " + seg.segment_id + " must translate out of English");
      }
      column = "wmt25_en_to_xx";
    } else {
      throw Error(ErrorKind::SchemaViolation,
                  "segment_id must start with 'flores:' or 'wmt25:', got '" + seg.segment_id + "'");
    }
    auto& [sum, n] = sums[column];
    sum += seg.score;
    ++n;
  }
  std::map<std::string, double> means;
  for (const auto& [column, acc] : sums) {
    means[column] = acc.first / static_cast<double>(acc.second);
  }
  return means;
}

} // namespace eval
} // namespace seedline
