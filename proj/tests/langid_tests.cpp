#include "doctest.h"

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "seedline/error.hpp"
#include "seedline/langid.hpp"
#include "seedline/utf8.hpp"

#include "test_support.hpp"

using namespace seedline;

namespace {

// Independent posterior computation: counts utf8-encoded grams in plain maps
// and works in probability space, normalizing once at the end.
std::map<std::string, double> oracle_posteriors(
    const std::string& text, const std::vector<std::pair<Lang, std::string>>& corpus, double alpha) {
  auto grams_of = [](const std::string& s, int n) {
    std::vector<std::string> out;
    auto cps = decode_utf8(s);
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= cps.size(); ++i) {
      std::string g;
      for (int k = 0; k < n; ++k) append_utf8(g, cps[i + static_cast<std::size_t>(k)]);
      out.push_back(g);
    }
    return out;
  };

  std::map<std::string, std::map<int, std::map<std::string, long>>> counts;
  std::map<int, std::set<std::string>> vocab;
  for (const auto& [lang, doc] : corpus) {
    for (int n = 1; n <= 3; ++n) {
      for (const auto& g : grams_of(doc, n)) {
        counts[std::string(lang.code())][n][g] += 1;
        vocab[n].insert(g);
      }
    }
  }

  std::map<std::string, double> loglik;
  for (const auto& [code, per_order] : counts) {
    double sum = 0.0;
    long scored = 0;
    for (int n = 1; n <= 3; ++n) {
      if (vocab[n].empty()) continue;
      long total = 0;
      auto it = per_order.find(n);
      if (it != per_order.end()) {
        for (const auto& [g, c] : it->second) total += c;
      }
      double denom = static_cast<double>(total) + alpha * static_cast<double>(vocab[n].size());
      for (const auto& g : grams_of(text, n)) {
        long c = 0;
        if (it != per_order.end()) {
          auto git = it->second.find(g);
          if (git != it->second.end()) c = git->second;
        }
        sum += std::log((static_cast<double>(c) + alpha) / denom);
        ++scored;
      }
    }
    loglik[code] = sum / static_cast<double>(scored);
  }

  double max_ll = loglik.begin()->second;
  for (const auto& [code, ll] : loglik) max_ll = std::max(max_ll, ll);
  double z = 0.0;
  std::map<std::string, double> posterior;
  for (const auto& [code, ll] : loglik) {
    posterior[code] = std::exp(ll - max_ll);
    z += posterior[code];
  }
  for (auto& [code, p] : posterior) p /= z;
  return posterior;
}

std::vector<std::pair<Lang, std::string>> tiny_corpus() {
  return {
      {Lang::from_code("en"), "the cat sat on the mat"},
      {Lang::from_code("en"), "a quick brown fox jumps"},
      {Lang::from_code("de"), "der hund schläft unter dem tisch"},
      {Lang::from_code("de"), "die katze sitzt auf der matte"},
      {Lang::from_code("fr"), "le chien dort sous la table"},
  };
}

} // namespace

TEST_CASE("posteriors match the independent oracle") {
  auto corpus = tiny_corpus();
  auto profiles = langid::train_profiles(corpus, 0.5);
  for (const std::string text :
       {"the fox sat", "der tisch", "la table", "katze", "quick", "x"}) {
    auto got = langid::classify_posteriors(text, profiles);
    auto want = oracle_posteriors(text, corpus, 0.5);
    REQUIRE(got.size() == want.size());
    for (const auto& [lang, p] : got) {
      CHECK(p == doctest::Approx(want.at(std::string(lang.code()))).epsilon(1e-9));
    }
  }
}

TEST_CASE("classify picks the right language on clear text") {
  auto profiles = langid::train_profiles(tiny_corpus(), 0.5);
  CHECK(langid::classify("the quick cat", profiles).lang.code() == "en");
  CHECK(langid::classify("der hund und die katze", profiles).lang.code() == "de");
  CHECK(langid::classify("le chien sous la table", profiles).lang.code() == "fr");
  auto result = langid::classify("der hund", profiles);
  CHECK(result.confidence > 1.0 / 3.0);
  CHECK(result.confidence <= 1.0);
}

TEST_CASE("posteriors always sum to one") {
  auto profiles = langid::train_profiles(tiny_corpus(), 0.5);
  for (const std::string text : {"abc", "der", "zzzz unrelated text"}) {
    auto post = langid::classify_posteriors(text, profiles);
    double sum = 0.0;
    for (const auto& [lang, p] : post) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("training input validation") {
  CHECK_THROWS_AS(langid::train_profiles({}, 0.5), Error);
  CHECK_THROWS_AS(langid::train_profiles({{Lang::from_code("en"), ""}}, 0.5), Error);
  CHECK_THROWS_AS(langid::train_profiles(tiny_corpus(), 0.0), Error);
}

TEST_CASE("classification input validation") {
  auto profiles = langid::train_profiles(tiny_corpus(), 0.5);
  CHECK_THROWS_AS(langid::classify_posteriors("", profiles), Error);
  std::vector<langid::LanguageProfile> one(profiles.begin(), profiles.begin() + 1);
  CHECK_THROWS_AS(langid::classify_posteriors("text", one), Error);
}

TEST_CASE("profiles survive a save/load round trip") {
  testsup::TempDir tmp("profiles");
  auto corpus = tiny_corpus();
  auto profiles = langid::train_profiles(corpus, 0.5);
  langid::save_profiles(tmp.str(), profiles);
  auto loaded = langid::load_profiles(tmp.str());
  REQUIRE(loaded.size() == profiles.size());
  for (const std::string text : {"the fox", "der hund", "la table"}) {
    auto a = langid::classify_posteriors(text, profiles);
    auto b = langid::classify_posteriors(text, loaded);
    for (const auto& [lang, p] : a) {
      CHECK(p == doctest::Approx(b.at(lang)).epsilon(1e-12));
    }
  }
}

TEST_CASE("load_profiles rejects malformed files") {
  testsup::TempDir tmp("badprof");
  testsup::spit(tmp.file("en.json"), "{\"lang\": \"en\"}");
  CHECK_THROWS_AS(langid::load_profiles(tmp.str()), Error);
  CHECK_THROWS_AS(langid::load_profiles(tmp.str() + "/missing"), Error);
}
