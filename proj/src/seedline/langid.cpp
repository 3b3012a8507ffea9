#include "seedline/langid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <limits>
#include <set>

#include "json_detail.hpp"
#include "seedline/error.hpp"
#include "seedline/json_io.hpp"
#include "seedline/utf8.hpp"

namespace seedline {
namespace langid {

using detail::json;

namespace {

std::vector<std::u32string> extract_ngrams(const std::vector<char32_t>& cps, int n) {
  std::vector<std::u32string> grams;
  if (static_cast<int>(cps.size()) < n) return grams;
  grams.reserve(cps.size() - static_cast<std::size_t>(n) + 1);
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= cps.size(); ++i) {
    grams.emplace_back(cps.begin() + static_cast<long>(i), cps.begin() + static_cast<long>(i + n));
  }
  return grams;
}

} // namespace

std::vector<LanguageProfile> train_profiles(const std::vector<std::pair<Lang, std::string>>& corpus,
                                            double alpha) {
  if (corpus.empty()) throw Error(ErrorKind::EmptyCorpus, "no training documents");
  if (alpha <= 0.0) throw Error(ErrorKind::ConfigError, "smoothing mass must be > 0");

  // counts[lang][n-1][gram], plus the union vocabulary per order.
  std::map<Lang, std::array<std::map<std::u32string, long>, kMaxOrder>> counts;
  std::array<std::set<std::u32string>, kMaxOrder> union_vocab;

  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& [lang, text] = corpus[i];
    if (text.empty()) {
      throw Error(ErrorKind::EmptyInput, "training document " + std::to_string(i) + " is empty");
    }
    std::vector<char32_t> cps = decode_utf8(text);
    auto& per_lang = counts[lang];
    for (int n = 1; n <= kMaxOrder; ++n) {
      for (auto& gram : extract_ngrams(cps, n)) {
        union_vocab[static_cast<std::size_t>(n - 1)].insert(gram);
        per_lang[static_cast<std::size_t>(n - 1)][std::move(gram)] += 1;
      }
    }
  }

  std::vector<LanguageProfile> profiles;
  profiles.reserve(counts.size());
  for (const auto& [lang, per_order] : counts) {
    LanguageProfile profile;
    profile.lang = lang;
    profile.smoothing_mass = alpha;
    for (int n = 1; n <= kMaxOrder; ++n) {
      const auto& vocab = union_vocab[static_cast<std::size_t>(n - 1)];
      OrderStats& stats = profile.orders[static_cast<std::size_t>(n - 1)];
      stats.vocab_size = static_cast<long>(vocab.size());
      if (vocab.empty()) continue;
      long total = 0;
      for (const auto& [gram, c] : per_order[static_cast<std::size_t>(n - 1)]) total += c;
      stats.total = total;
      double denom = static_cast<double>(total) + alpha * static_cast<double>(vocab.size());
      stats.unseen_logprob = std::log(alpha / denom);
      for (const auto& [gram, c] : per_order[static_cast<std::size_t>(n - 1)]) {
        stats.logprobs[gram] = std::log((static_cast<double>(c) + alpha) / denom);
      }
    }
    profiles.push_back(std::move(profile));
  }
  return profiles;
}

std::map<Lang, double> classify_posteriors(const std::string& text,
                                           const std::vector<LanguageProfile>& profiles) {
  if (text.empty()) throw Error(ErrorKind::EmptyInput, "cannot classify empty text");
  if (profiles.size() < 2) throw Error(ErrorKind::EmptyCorpus, "classification needs at least 2 profiles");

  std::vector<char32_t> cps = decode_utf8(text);
  std::array<std::vector<std::u32string>, kMaxOrder> grams;
  for (int n = 1; n <= kMaxOrder; ++n) {
    grams[static_cast<std::size_t>(n - 1)] = extract_ngrams(cps, n);
  }

  // Length-normalized log-likelihood per profile; orders with an empty
  // union vocabulary are untrained and contribute nothing.
  std::map<Lang, double> loglik;
  for (const auto& profile : profiles) {
    double sum = 0.0;
    long scored = 0;
    for (int n = 1; n <= kMaxOrder; ++n) {
      const OrderStats& stats = profile.orders[static_cast<std::size_t>(n - 1)];
      if (stats.vocab_size == 0) continue;
      for (const auto& gram : grams[static_cast<std::size_t>(n - 1)]) {
        auto it = stats.logprobs.find(gram);
        sum += (it != stats.logprobs.end()) ? it->second : stats.unseen_logprob;
        ++scored;
      }
    }
    if (scored == 0) throw Error(ErrorKind::EmptyInput, "text yields no scorable n-grams");
    loglik[profile.lang] = sum / static_cast<double>(scored);
  }

  double max_ll = -std::numeric_limits<double>::infinity();
  for (const auto& [lang, ll] : loglik) max_ll = std::max(max_ll, ll);
  double z = 0.0;
  std::map<Lang, double> posterior;
  for (const auto& [lang, ll] : loglik) {
    double w = std::exp(ll - max_ll);
    posterior[lang] = w;
    z += w;
  }
  for (auto& [lang, p] : posterior) p /= z;
  return posterior;
}

Classification classify(const std::string& text, const std::vector<LanguageProfile>& profiles) {
  std::map<Lang, double> posterior = classify_posteriors(text, profiles);
  // Map iteration is code order, so "first strict improvement" breaks ties
  // toward the lexicographically smallest code.
  Classification best;
  bool first = true;
  for (const auto& [lang, p] : posterior) {
    if (first || p > best.confidence) {
      best.lang = lang;
      best.confidence = p;
      first = false;
    }
  }
  return best;
}

void save_profiles(const std::string& dir, const std::vector<LanguageProfile>& profiles) {
  std::filesystem::create_directories(dir);
  for (const auto& profile : profiles) {
    json j;
    j["lang"] = std::string(profile.lang.code());
    j["smoothing_mass"] = profile.smoothing_mass;
    json orders = json::array();
    for (int n = 1; n <= kMaxOrder; ++n) {
      const OrderStats& stats = profile.orders[static_cast<std::size_t>(n - 1)];
      json o;
      o["n"] = n;
      o["vocab_size"] = stats.vocab_size;
      o["total"] = stats.total;
      o["unseen_logprob"] = stats.unseen_logprob;
      json lp;
      for (const auto& [gram, logp] : stats.logprobs) {
        std::string key;
        for (char32_t cp : gram) append_utf8(key, cp);
        lp[key] = logp;
      }
      o["logprobs"] = lp;
      orders.push_back(std::move(o));
    }
    j["orders"] = std::move(orders);
    write_file_atomic(dir + "/" + std::string(profile.lang.code()) + ".json", j.dump(2) + "\n");
  }
}

std::vector<LanguageProfile> load_profiles(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(ErrorKind::IoError, "'" + dir + "' is not a directory");
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  std::vector<LanguageProfile> profiles;
  for (const auto& path : files) {
    json j = detail::parse_json(read_file(path), path);
    detail::require_object(j, path);
    detail::check_keys(j, {"lang", "smoothing_mass", "orders"}, path);
    LanguageProfile profile;
    profile.lang = Lang::from_code(detail::get_string(j, "lang", path));
    profile.smoothing_mass = detail::get_number(j, "smoothing_mass", path);
    const json& orders = detail::require_field(j, "orders", path);
    if (!orders.is_array() || orders.size() != kMaxOrder) {
      throw Error(ErrorKind::SchemaViolation, path + ": 'orders' must list orders 1.." +
                                                  std::to_string(kMaxOrder));
    }
    for (const auto& o : orders) {
      detail::require_object(o, path + ".orders");
      detail::check_keys(o, {"n", "vocab_size", "total", "unseen_logprob", "logprobs"}, path);
      int n = static_cast<int>(detail::get_integer(o, "n", path));
      if (n < 1 || n > kMaxOrder) throw Error(ErrorKind::SchemaViolation, path + ": order out of range");
      OrderStats& stats = profile.orders[static_cast<std::size_t>(n - 1)];
      stats.vocab_size = detail::get_integer(o, "vocab_size", path);
      stats.total = detail::get_integer(o, "total", path);
      stats.unseen_logprob = detail::get_number(o, "unseen_logprob", path);
      const json& lp = detail::require_field(o, "logprobs", path);
      detail::require_object(lp, path + ".logprobs");
      for (auto it = lp.begin(); it != lp.end(); ++it) {
        if (!it.value().is_number()) {
          throw Error(ErrorKind::SchemaViolation, path + ": logprob for '" + it.key() + "' must be a number");
        }
        std::vector<char32_t> cps = decode_utf8(it.key());
        stats.logprobs[std::u32string(cps.begin(), cps.end())] = it.value().get<double>();
      }
    }
    profiles.push_back(std::move(profile));
  }
  return profiles;
}

} // namespace langid
} // namespace seedline
