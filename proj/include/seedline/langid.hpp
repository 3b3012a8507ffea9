#pragma once

#include <map>
#include <string>
#include <vector>

#include "seedline/lang.hpp"

namespace seedline {
namespace langid {

// Naive Bayes over character 1..3-grams with additive smoothing shared
// across the profile set: alpha = smoothing_mass, applied over the union
// n-gram vocabulary of all profiles trained together, so log-likelihoods
// are comparable between languages.

constexpr int kMaxOrder = 3;
constexpr double kDefaultAlpha = 0.5;

struct OrderStats {
  std::map<std::u32string, double> logprobs; // seen n-grams only
  double unseen_logprob = 0.0;               // any union-vocab gram unseen here
  long vocab_size = 0;                       // union vocab size for this n
  long total = 0;                            // grams observed in training
};

struct LanguageProfile {
  Lang lang = Lang::from_code("en");
  double smoothing_mass = kDefaultAlpha;
  // Index 0 holds n=1. Orders with an empty union vocabulary stay unused.
  std::vector<OrderStats> orders = std::vector<OrderStats>(kMaxOrder);
};

struct Classification {
  Lang lang = Lang::from_code("en");
  double confidence = 0.0;
};

std::vector<LanguageProfile> train_profiles(const std::vector<std::pair<Lang, std::string>>& corpus,
                                            double alpha = kDefaultAlpha);

// Softmax posterior over length-normalized log-likelihoods. Keys are every
// profile's language; values sum to 1.
std::map<Lang, double> classify_posteriors(const std::string& text,
                                           const std::vector<LanguageProfile>& profiles);

// Argmax of the posterior; ties go to the lexicographically smallest code.
Classification classify(const std::string& text, const std::vector<LanguageProfile>& profiles);

// Profile store: one JSON file per language ("<code>.json") in a directory.
void save_profiles(const std::string& dir, const std::vector<LanguageProfile>& profiles);
std::vector<LanguageProfile> load_profiles(const std::string& dir);

} // namespace langid
} // namespace seedline
