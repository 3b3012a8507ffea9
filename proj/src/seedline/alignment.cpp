#include "seedline/alignment.hpp"

#include <cmath>
#include <set>

#include "json_detail.hpp"
#include "seedline/error.hpp"
#include "seedline/json_io.hpp"
#include "seedline/utf8.hpp"

namespace seedline {
namespace para {

using detail::json;

std::vector<std::string> tokenize_for_alignment(const std::string& text, Lang lang) {
  std::vector<std::string> tokens;
  if (lang.char_tokenized()) {
    for (char32_t cp : decode_utf8(text)) {
      if (cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r') continue;
      std::string tok;
      append_utf8(tok, cp);
      tokens.push_back(std::move(tok));
    }
    return tokens;
  }
  std::string current;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      if (!current.empty()) tokens.push_back(std::move(current)), current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

double AlignmentModel::prob(const std::string& src_token, const std::string& tgt_token) const {
  auto row = lex_probs.find(src_token);
  if (row == lex_probs.end()) return 0.0;
  auto cell = row->second.find(tgt_token);
  return cell == row->second.end() ? 0.0 : cell->second;
}

namespace {

struct TokenizedPair {
  std::vector<std::string> src;
  std::vector<std::string> tgt;
};

std::vector<TokenizedPair> tokenize_corpus(const std::vector<SentencePair>& pairs, Lang src_lang,
                                           Lang tgt_lang) {
  std::vector<TokenizedPair> out;
  out.reserve(pairs.size());
  for (const auto& pair : pairs) {
    if (pair.src_lang != src_lang || pair.tgt_lang != tgt_lang) {
      throw Error(ErrorKind::DirectionMismatch,
                  "pair '" + pair.id + "' is " + pair.direction() + ", expected " +
                      std::string(src_lang.code()) + "-" + std::string(tgt_lang.code()));
    }
    out.push_back({tokenize_for_alignment(pair.src_text, src_lang),
                   tokenize_for_alignment(pair.tgt_text, tgt_lang)});
  }
  return out;
}

double log_likelihood(const std::vector<TokenizedPair>& corpus,
                      const std::map<std::string, std::map<std::string, double>>& t) {
  double ll = 0.0;
  for (const auto& pair : corpus) {
    if (pair.src.empty() || pair.tgt.empty()) continue;
    double log_l = std::log(static_cast<double>(pair.src.size()));
    for (const auto& f : pair.tgt) {
      double sum = 0.0;
      for (const auto& e : pair.src) {
        auto row = t.find(e);
        if (row == t.end()) continue;
        auto cell = row->second.find(f);
        if (cell != row->second.end()) sum += cell->second;
      }
      ll += std::log(sum) - log_l;
    }
  }
  return ll;
}

} // namespace

AlignmentModel train_alignment(const std::vector<SentencePair>& pairs, int iterations,
                               TrainStats* stats) {
  if (pairs.empty()) throw Error(ErrorKind::EmptyCorpus, "no pairs to train on");
  if (iterations < 1) throw Error(ErrorKind::ConfigError, "EM iterations must be >= 1");

  AlignmentModel model;
  model.src_lang = pairs.front().src_lang;
  model.tgt_lang = pairs.front().tgt_lang;
  model.em_iterations = iterations;

  std::vector<TokenizedPair> corpus = tokenize_corpus(pairs, model.src_lang, model.tgt_lang);

  std::set<std::string> tgt_vocab;
  for (const auto& pair : corpus) tgt_vocab.insert(pair.tgt.begin(), pair.tgt.end());
  if (tgt_vocab.empty()) throw Error(ErrorKind::EmptyCorpus, "target side tokenizes to nothing");

  // Uniform initialization over co-occurring (src, tgt) token pairs.
  auto& t = model.lex_probs;
  for (const auto& pair : corpus) {
    for (const auto& e : pair.src) {
      for (const auto& f : pair.tgt) t[e][f] = 0.0;
    }
  }
  for (auto& [e, row] : t) {
    double uniform = 1.0 / static_cast<double>(row.size());
    for (auto& [f, p] : row) p = uniform;
  }

  if (stats != nullptr) {
    stats->log_likelihood_per_iteration.clear();
    stats->log_likelihood_per_iteration.push_back(log_likelihood(corpus, t));
  }

  for (int iter = 0; iter < iterations; ++iter) {
    std::map<std::string, std::map<std::string, double>> counts;
    std::map<std::string, double> totals;
    for (const auto& pair : corpus) {
      if (pair.src.empty() || pair.tgt.empty()) continue;
      for (const auto& f : pair.tgt) {
        double denom = 0.0;
        for (const auto& e : pair.src) denom += t[e][f];
        if (denom <= 0.0) continue;
        for (const auto& e : pair.src) {
          double share = t[e][f] / denom;
          counts[e][f] += share;
          totals[e] += share;
        }
      }
    }
    for (auto& [e, row] : counts) {
      double total = totals[e];
      if (total <= 0.0) continue;
      for (auto& [f, c] : row) t[e][f] = c / total;
    }
    if (stats != nullptr) stats->log_likelihood_per_iteration.push_back(log_likelihood(corpus, t));
  }
  return model;
}

double corpus_log_likelihood(const std::vector<SentencePair>& pairs, const AlignmentModel& model) {
  return log_likelihood(tokenize_corpus(pairs, model.src_lang, model.tgt_lang), model.lex_probs);
}

double alignment_score(const SentencePair& pair, const AlignmentModel& model, double tau,
                       const AlignmentModel* reverse) {
  if (pair.src_lang != model.src_lang || pair.tgt_lang != model.tgt_lang) {
    throw Error(ErrorKind::DirectionMismatch, "model is " + std::string(model.src_lang.code()) + "-" +
                                                  std::string(model.tgt_lang.code()) + ", pair is " +
                                                  pair.direction());
  }
  auto directed = [tau](const std::vector<std::string>& src_tokens,
                        const std::vector<std::string>& tgt_tokens, const AlignmentModel& m) {
    if (src_tokens.empty() || tgt_tokens.empty()) return 0.0;
    long aligned = 0;
    for (const auto& e : src_tokens) {
      double best = 0.0;
      for (const auto& f : tgt_tokens) best = std::max(best, m.prob(e, f));
      if (best > tau) ++aligned;
    }
    return static_cast<double>(aligned) / static_cast<double>(src_tokens.size());
  };

  std::vector<std::string> src_tokens = tokenize_for_alignment(pair.src_text, pair.src_lang);
  std::vector<std::string> tgt_tokens = tokenize_for_alignment(pair.tgt_text, pair.tgt_lang);
  double forward = directed(src_tokens, tgt_tokens, model);
  if (reverse == nullptr) return forward;

  if (reverse->src_lang != pair.tgt_lang || reverse->tgt_lang != pair.src_lang) {
    throw Error(ErrorKind::DirectionMismatch, "reverse model direction does not mirror the pair");
  }
  double backward = directed(tgt_tokens, src_tokens, *reverse);
  return (forward + backward) / 2.0;
}

void save_alignment(const std::string& path, const AlignmentModel& model) {
  json j;
  j["src_lang"] = std::string(model.src_lang.code());
  j["tgt_lang"] = std::string(model.tgt_lang.code());
  j["em_iterations"] = model.em_iterations;
  json probs;
  for (const auto& [e, row] : model.lex_probs) {
    json jrow;
    for (const auto& [f, p] : row) jrow[f] = p;
    probs[e] = std::move(jrow);
  }
  j["lex_probs"] = std::move(probs);
  write_file_atomic(path, j.dump(2) + "\n");
}

AlignmentModel load_alignment(const std::string& path) {
  json j = detail::parse_json(read_file(path), path);
  detail::require_object(j, path);
  detail::check_keys(j, {"src_lang", "tgt_lang", "em_iterations", "lex_probs"}, path);
  AlignmentModel model;
  model.src_lang = Lang::from_code(detail::get_string(j, "src_lang", path));
  model.tgt_lang = Lang::from_code(detail::get_string(j, "tgt_lang", path));
  model.em_iterations = static_cast<int>(detail::get_integer(j, "em_iterations", path));
  const json& probs = detail::require_field(j, "lex_probs", path);
  detail::require_object(probs, path + ".lex_probs");
  for (auto row = probs.begin(); row != probs.end(); ++row) {
    detail::require_object(row.value(), path + ".lex_probs." + row.key());
    for (auto cell = row.value().begin(); cell != row.value().end(); ++cell) {
      if (!cell.value().is_number()) {
        throw Error(ErrorKind::SchemaViolation, path + ": probabilities must be numbers");
      }
      model.lex_probs[row.key()][cell.key()] = cell.value().get<double>();
    }
  }
  return model;
}

} // namespace para
} // namespace seedline
