#pragma once

#include <map>
#include <string>
#include <vector>

#include "seedline/config.hpp"
#include "seedline/langid.hpp"
#include "seedline/para_filter.hpp"
#include "seedline/types.hpp"

namespace seedline {
namespace para {

struct GenerateResult {
  std::vector<SentencePair> pairs;
  long skipped_same_language = 0;
  long skipped_service_failure = 0;
};

// Forward-translates each document into tgt_lang. Emitted pairs carry
// provenance PseudoParallel and the given round stamp; documents already in
// tgt_lang and documents whose translation call fails are skipped.
GenerateResult generate_pseudo_parallel(const std::vector<Document>& docs, Lang tgt_lang,
                                        const ServiceClient& translator, int round,
                                        int beam_size = 4);

struct RewriteResult {
  std::vector<SentencePair> pairs;
  long skipped_service_failure = 0;
};

// Replaces tgt_text with the rewriter's output; provenance becomes Rewritten
// and the record's round advances by one. Pairs whose rewrite call fails are
// dropped from the output and counted.
RewriteResult rewrite_pairs(const std::vector<SentencePair>& pairs, const ServiceClient& rewriter);

struct BoostRoundState {
  int round = 0; // completed rounds; shards land in round_{round+1}
  std::map<Provenance, long> counts;
  std::vector<std::string> output_shard_paths;
};

struct BoostRoundReport {
  BoostRoundState state;
  long processed = 0;
  long accepted = 0;
  long rejected = 0;
  long skipped = 0;
  std::map<std::string, long> reject_reasons;
  std::string round_dir;
  std::string manifest_path;
};

struct BoostInputs {
  std::vector<Document> docs;       // monolingual material to forward-translate
  std::vector<SentencePair> pairs;  // existing pairs to refine
  std::vector<std::string> input_files; // original paths, for the manifest
};

// One weak-to-strong round: generate, rewrite (unless config.skip_rewrite),
// filter, then atomically publish accepted pairs under
// `<out_dir>/round_<NNN>/` with a deterministic manifest. The alignment
// check trains a throwaway Model 1 per direction on the round's own
// candidates; every accepted record is stamped with the new round number.
BoostRoundReport run_boost_round(const BoostRoundState& state, const BoostInputs& inputs,
                                 Lang tgt_lang, const ServiceSet& services,
                                 const PipelineConfig& config, const std::string& out_dir,
                                 const std::vector<langid::LanguageProfile>& profiles);

constexpr int kRoundEmIterations = 5;
constexpr std::size_t kShardMaxLines = 1000;

} // namespace para
} // namespace seedline
