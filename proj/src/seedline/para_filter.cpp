#include "seedline/para_filter.hpp"

#include <algorithm>

#include "seedline/utf8.hpp"

namespace seedline {
namespace para {

const char* to_string(FilterReason reason) {
  switch (reason) {
    case FilterReason::Empty: return "empty";
    case FilterReason::LowLidConfidenceSrc: return "low_lid_confidence_src";
    case FilterReason::LowLidConfidenceTgt: return "low_lid_confidence_tgt";
    case FilterReason::LowAlignment: return "low_alignment";
    case FilterReason::LengthRatio: return "length_ratio";
  }
  return "unknown";
}

FilterThresholds thresholds_from_config(const PipelineConfig& config) {
  FilterThresholds t;
  t.lid_min = config.lid_min;
  t.align_min = config.align_min;
  t.tau_align = config.tau_align;
  t.length_ratio_max = config.length_ratio_max;
  return t;
}

namespace {

double lid_posterior(const std::string& text, Lang lang,
                     const std::vector<langid::LanguageProfile>& profiles) {
  std::map<Lang, double> posterior = langid::classify_posteriors(text, profiles);
  auto it = posterior.find(lang);
  return it == posterior.end() ? 0.0 : it->second;
}

} // namespace

FilterVerdict filter_pair(const SentencePair& pair,
                          const std::vector<langid::LanguageProfile>& profiles,
                          const AlignmentModel* model, const FilterThresholds& thresholds) {
  FilterVerdict verdict;

  std::size_t src_chars = codepoint_count(pair.src_text);
  std::size_t tgt_chars = codepoint_count(pair.tgt_text);
  std::vector<std::string> src_tokens = tokenize_for_alignment(pair.src_text, pair.src_lang);
  std::vector<std::string> tgt_tokens = tokenize_for_alignment(pair.tgt_text, pair.tgt_lang);
  bool src_empty = src_chars == 0 || src_tokens.empty();
  bool tgt_empty = tgt_chars == 0 || tgt_tokens.empty();

  if (src_empty || tgt_empty) verdict.reasons.push_back(FilterReason::Empty);

  bool lid_enabled = thresholds.lid_min > 0.0 && profiles.size() >= 2;
  if (lid_enabled) {
    if (!src_empty && lid_posterior(pair.src_text, pair.src_lang, profiles) < thresholds.lid_min) {
      verdict.reasons.push_back(FilterReason::LowLidConfidenceSrc);
    }
    if (!tgt_empty && lid_posterior(pair.tgt_text, pair.tgt_lang, profiles) < thresholds.lid_min) {
      verdict.reasons.push_back(FilterReason::LowLidConfidenceTgt);
    }
  }

  if (!src_empty && !tgt_empty) {
    if (model != nullptr &&
        alignment_score(pair, *model, thresholds.tau_align) < thresholds.align_min) {
      verdict.reasons.push_back(FilterReason::LowAlignment);
    }
    double longer = static_cast<double>(std::max(src_chars, tgt_chars));
    double shorter = static_cast<double>(std::min(src_chars, tgt_chars));
    if (longer / shorter > thresholds.length_ratio_max) {
      verdict.reasons.push_back(FilterReason::LengthRatio);
    }
  }

  verdict.accepted = verdict.reasons.empty();
  return verdict;
}

} // namespace para
} // namespace seedline
