#pragma once

#include <optional>
#include <string>
#include <vector>

#include "seedline/alignment.hpp"
#include "seedline/config.hpp"
#include "seedline/langid.hpp"
#include "seedline/types.hpp"

namespace seedline {
namespace para {

enum class FilterReason {
  Empty,
  LowLidConfidenceSrc,
  LowLidConfidenceTgt,
  LowAlignment,
  LengthRatio,
};

const char* to_string(FilterReason reason);

struct FilterVerdict {
  bool accepted = false;
  std::vector<FilterReason> reasons; // accepted == reasons.empty()
};

struct FilterThresholds {
  double lid_min = 0.8;
  double align_min = 0.5;
  double tau_align = 0.1;
  double length_ratio_max = 3.0;
};

FilterThresholds thresholds_from_config(const PipelineConfig& config);

// Every applicable check runs (no short-circuit) so `reasons` is complete.
// The LID confidence of a side is the posterior of that side's labeled
// language; with lid_min = 0 or no profiles supplied the check is vacuous.
// Alignment and length-ratio checks need both sides non-empty; an empty side
// yields the single applicable reason Empty.
FilterVerdict filter_pair(const SentencePair& pair,
                          const std::vector<langid::LanguageProfile>& profiles,
                          const AlignmentModel* model, const FilterThresholds& thresholds);

} // namespace para
} // namespace seedline
