#pragma once

#include <map>
#include <string>
#include <vector>

#include "seedline/types.hpp"

namespace seedline {
namespace para {

// IBM Model 1 without a NULL token: EM over lexical translation tables with
// uniform initialization. Tokenization is whitespace-based except for
// languages written without word spaces (zh, ja, th), which split per
// codepoint.

std::vector<std::string> tokenize_for_alignment(const std::string& text, Lang lang);

struct AlignmentModel {
  Lang src_lang = Lang::from_code("en");
  Lang tgt_lang = Lang::from_code("de");
  // p(tgt_token | src_token), normalized per src_token.
  std::map<std::string, std::map<std::string, double>> lex_probs;
  int em_iterations = 0;

  double prob(const std::string& src_token, const std::string& tgt_token) const;
};

struct TrainStats {
  std::vector<double> log_likelihood_per_iteration; // non-decreasing
};

AlignmentModel train_alignment(const std::vector<SentencePair>& pairs, int iterations,
                               TrainStats* stats = nullptr);

// Corpus log-likelihood under the model: sum over pairs of
// sum_t log((1/l_src) * sum_s p(t|s)).
double corpus_log_likelihood(const std::vector<SentencePair>& pairs, const AlignmentModel& model);

// Fraction of source tokens whose best in-pair target probability exceeds
// tau. With a reverse model supplied, the mean of both directions.
double alignment_score(const SentencePair& pair, const AlignmentModel& model, double tau = 0.1,
                       const AlignmentModel* reverse = nullptr);

void save_alignment(const std::string& path, const AlignmentModel& model);
AlignmentModel load_alignment(const std::string& path);

} // namespace para
} // namespace seedline
