#include "seedline/mono.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "seedline/error.hpp"
#include "seedline/rng.hpp"
#include "seedline/utf8.hpp"

namespace seedline {
namespace mono {

QualityScorer heuristic_scorer(const QualityThresholds& thresholds) {
  return [thresholds](const Document& doc) {
    std::vector<char32_t> cps = decode_utf8(doc.text);
    if (cps.empty()) return QualityTier::Low;
    std::size_t symbols = 0;
    for (char32_t cp : cps) {
      // ASCII letters/digits and anything beyond ASCII count as content;
      // punctuation, digits-adjacent symbols and control bytes count against.
      bool content = (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z') ||
                     (cp >= U'0' && cp <= U'9') || cp == U' ' || cp > 0x7F;
      if (!content) ++symbols;
    }
    double symbol_ratio = static_cast<double>(symbols) / static_cast<double>(cps.size());
    if (cps.size() < thresholds.low_max_chars || symbol_ratio > thresholds.max_symbol_ratio) {
      return QualityTier::Low;
    }
    if (cps.size() >= thresholds.high_min_chars && symbol_ratio <= thresholds.max_symbol_ratio / 2.0) {
      return QualityTier::High;
    }
    return QualityTier::Medium;
  };
}

std::vector<Document> tier_documents(const std::vector<Document>& docs, const QualityScorer& scorer) {
  std::vector<Document> out;
  out.reserve(docs.size());
  for (const auto& doc : docs) {
    Document tiered = doc;
    try {
      tiered.tier = scorer(doc);
    } catch (const std::exception& e) {
      throw Error(ErrorKind::ScorerFailure, "scorer failed on document '" + doc.id + "': " + e.what());
    }
    if (tiered.tier == QualityTier::Unassigned) {
      throw Error(ErrorKind::ScorerFailure, "scorer left document '" + doc.id + "' untiered");
    }
    out.push_back(std::move(tiered));
  }
  return out;
}

RouteResult route_by_tier(const std::vector<Document>& docs, const ServiceClient& paraphraser) {
  RouteResult result;
  for (const auto& doc : docs) {
    switch (doc.tier) {
      case QualityTier::High:
        result.retained.push_back(doc);
        break;
      case QualityTier::Low:
        ++result.dropped_count;
        break;
      case QualityTier::Medium: {
        Document rewritten = doc;
        try {
          ParaphraseRequest req;
          req.id = doc.id;
          req.text = doc.text;
          req.lang = doc.lang;
          rewritten.text = paraphraser.paraphrase(req).text;
          rewritten.char_count = codepoint_count(rewritten.text);
        } catch (const Error&) {
          // Keep the original rather than lose the document; the count makes
          // the fallback visible in reports.
          ++result.paraphrase_failures;
        }
        result.rewritten.push_back(std::move(rewritten));
        break;
      }
      case QualityTier::Unassigned:
        throw Error(ErrorKind::UntieredDocument, "document '" + doc.id + "' has no tier");
    }
  }
  return result;
}

QualityLoopResult quality_loop(std::vector<Document> docs, const QualityScorer& scorer,
                               const ServiceClient& paraphraser, int iterations) {
  if (iterations < 1) throw Error(ErrorKind::ConfigError, "quality iterations must be >= 1");
  QualityLoopResult result;
  for (int it = 0; it < iterations; ++it) {
    std::map<std::string, std::string> before;
    for (const auto& doc : docs) before[doc.id] = doc.text;

    std::vector<Document> tiered = tier_documents(docs, scorer);
    RouteResult routed = route_by_tier(tiered, paraphraser);
    result.dropped_total += routed.dropped_count;
    ++result.iterations_run;

    std::vector<Document> next = routed.retained;
    next.insert(next.end(), routed.rewritten.begin(), routed.rewritten.end());
    bool changed = routed.dropped_count > 0;
    for (const auto& doc : next) {
      if (changed) break;
      auto it_before = before.find(doc.id);
      changed = it_before == before.end() || it_before->second != doc.text;
    }
    docs = std::move(next);
    if (!changed) break;
  }
  result.docs = std::move(docs);
  return result;
}

std::size_t unique_tag_count(const std::vector<Document>& docs) {
  std::set<std::string> tags;
  for (const auto& doc : docs) tags.insert(doc.tags.begin(), doc.tags.end());
  return tags.size();
}

namespace {

// A selection is feasible when every tag's count fits under the ceiling cap,
// or when at most one distinct tag is present.
bool selection_feasible(const std::map<std::string, long>& tag_counts, std::size_t selected,
                        double max_tag_share) {
  if (tag_counts.size() < 2 || selected == 0) return true;
  long cap = static_cast<long>(std::ceil(max_tag_share * static_cast<double>(selected)));
  for (const auto& [tag, count] : tag_counts) {
    if (count > cap) return false;
  }
  return true;
}

} // namespace

std::vector<Document> balance_topics(const std::vector<Document>& docs, const BalanceSpec& spec,
                                     std::uint64_t seed) {
  if (spec.max_tag_share <= 0.0 || spec.max_tag_share > 1.0) {
    throw Error(ErrorKind::ConfigError, "max_tag_share must be in (0, 1]");
  }
  if (spec.max_tag_share == 1.0) return docs;

  std::vector<bool> selected(docs.size(), true);
  std::size_t n_selected = docs.size();
  std::map<std::string, long> tag_counts;
  for (const auto& doc : docs) {
    for (const auto& tag : doc.tags) tag_counts[tag] += 1;
  }

  std::mt19937_64 rng = make_engine(seed);
  // Drop one document at a time from the most over-cap tag until feasible.
  // The victim is uniform among that tag's selected documents; ties between
  // equally over-cap tags go to the lexicographically smallest tag.
  while (!selection_feasible(tag_counts, n_selected, spec.max_tag_share)) {
    long cap = static_cast<long>(std::ceil(spec.max_tag_share * static_cast<double>(n_selected)));
    std::string worst_tag;
    long worst_excess = 0;
    for (const auto& [tag, count] : tag_counts) {
      long excess = count - cap;
      if (excess > worst_excess) {
        worst_excess = excess;
        worst_tag = tag;
      }
    }
    std::vector<std::size_t> holders;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (!selected[i]) continue;
      if (std::find(docs[i].tags.begin(), docs[i].tags.end(), worst_tag) != docs[i].tags.end()) {
        holders.push_back(i);
      }
    }
    std::size_t victim = holders[next_below(rng, holders.size())];
    selected[victim] = false;
    --n_selected;
    for (const auto& tag : docs[victim].tags) tag_counts[tag] -= 1;
  }

  std::vector<Document> out;
  out.reserve(n_selected);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (selected[i]) out.push_back(docs[i]);
  }
  return out;
}

std::vector<Document> filter_excluded_tags(const std::vector<Document>& docs,
                                           const std::vector<std::string>& exclude) {
  if (exclude.empty()) return docs;
  std::set<std::string> banned(exclude.begin(), exclude.end());
  std::vector<Document> out;
  for (const auto& doc : docs) {
    bool hit = false;
    for (const auto& tag : doc.tags) {
      if (banned.count(tag) != 0) {
        hit = true;
        break;
      }
    }
    if (!hit) out.push_back(doc);
  }
  return out;
}

std::map<Lang, LanguageShare> language_token_report(const std::vector<Document>& docs,
                                                    const bpe::BpeVocab& vocab) {
  std::map<Lang, LanguageShare> report;
  long total = 0;
  for (const auto& doc : docs) {
    long tokens = static_cast<long>(bpe::encode(doc.text, vocab).size());
    report[doc.lang].token_count += tokens;
    total += tokens;
  }
  if (total > 0) {
    for (auto& [lang, share] : report) {
      share.proportion = static_cast<double>(share.token_count) / static_cast<double>(total);
    }
  }
  return report;
}

} // namespace mono
} // namespace seedline
