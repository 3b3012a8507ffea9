#include "seedline/bpe.hpp"

#include <algorithm>
#include <array>

#include "json_detail.hpp"
#include "seedline/error.hpp"
#include "seedline/json_io.hpp"
#include "seedline/lang.hpp"
#include "seedline/utf8.hpp"

namespace seedline {
namespace bpe {

using detail::json;

namespace {

// GPT-2-style byte <-> printable-codepoint table so vocab files stay valid
// UTF-8 no matter which raw bytes a token contains.
std::array<char32_t, 256> byte_to_unicode_table() {
  std::array<char32_t, 256> table{};
  std::vector<bool> direct(256, false);
  auto mark = [&direct](int lo, int hi) {
    for (int b = lo; b <= hi; ++b) direct[static_cast<std::size_t>(b)] = true;
  };
  mark('!', '~');
  mark(0xA1, 0xAC);
  mark(0xAE, 0xFF);
  char32_t next = 256;
  for (int b = 0; b < 256; ++b) {
    table[static_cast<std::size_t>(b)] = direct[static_cast<std::size_t>(b)]
                                             ? static_cast<char32_t>(b)
                                             : next++;
  }
  return table;
}

std::string bytes_to_printable(const std::string& bytes) {
  static const std::array<char32_t, 256> table = byte_to_unicode_table();
  std::string out;
  for (char c : bytes) append_utf8(out, table[static_cast<unsigned char>(c)]);
  return out;
}

std::string printable_to_bytes(const std::string& printable) {
  static const std::map<char32_t, unsigned char> reverse = [] {
    std::array<char32_t, 256> table = byte_to_unicode_table();
    std::map<char32_t, unsigned char> rev;
    for (int b = 0; b < 256; ++b) rev[table[static_cast<std::size_t>(b)]] = static_cast<unsigned char>(b);
    return rev;
  }();
  std::string out;
  for (char32_t cp : decode_utf8(printable)) {
    auto it = reverse.find(cp);
    if (it == reverse.end()) throw Error(ErrorKind::SchemaViolation, "vocab token holds a foreign codepoint");
    out += static_cast<char>(it->second);
  }
  return out;
}

// Splits text around registered special tokens; special segments carry
// is_special = true. Earliest match wins; on equal start, the longest.
struct Segment {
  std::string text;
  bool is_special = false;
};

std::vector<Segment> split_specials(const std::string& text, const std::vector<std::string>& specials) {
  std::vector<Segment> segments;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t best_at = std::string::npos;
    std::size_t best_len = 0;
    for (const auto& sp : specials) {
      if (sp.empty()) continue;
      std::size_t at = text.find(sp, pos);
      if (at == std::string::npos) continue;
      if (at < best_at || (at == best_at && sp.size() > best_len)) {
        best_at = at;
        best_len = sp.size();
      }
    }
    if (best_at == std::string::npos) {
      segments.push_back({text.substr(pos), false});
      break;
    }
    if (best_at > pos) segments.push_back({text.substr(pos, best_at - pos), false});
    segments.push_back({text.substr(best_at, best_len), true});
    pos = best_at + best_len;
  }
  return segments;
}

std::vector<std::string> to_byte_symbols(const std::string& text) {
  std::vector<std::string> symbols;
  symbols.reserve(text.size());
  for (char c : text) symbols.emplace_back(1, c);
  return symbols;
}

void apply_merge(std::vector<std::string>& symbols, const std::string& a, const std::string& b) {
  std::size_t write = 0;
  std::size_t read = 0;
  while (read < symbols.size()) {
    if (read + 1 < symbols.size() && symbols[read] == a && symbols[read + 1] == b) {
      symbols[write++] = a + b;
      read += 2;
    } else {
      symbols[write++] = std::move(symbols[read++]);
    }
  }
  symbols.resize(write);
}

} // namespace

int BpeVocab::id_of(const std::string& token) const {
  auto it = token_to_id.find(token);
  if (it == token_to_id.end()) throw Error(ErrorKind::SchemaViolation, "token not in vocab");
  return it->second;
}

void BpeVocab::build_reverse() const {
  id_to_token_.assign(token_to_id.size(), std::string());
  for (const auto& [token, id] : token_to_id) {
    if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size()) {
      throw Error(ErrorKind::SchemaViolation, "vocab ids are not dense");
    }
    id_to_token_[static_cast<std::size_t>(id)] = token;
  }
}

const std::string& BpeVocab::token_of(int id) const {
  if (id_to_token_.size() != token_to_id.size()) build_reverse();
  if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size()) {
    throw Error(ErrorKind::SchemaViolation, "token id " + std::to_string(id) + " out of range");
  }
  return id_to_token_[static_cast<std::size_t>(id)];
}

std::vector<std::string> default_special_tokens() {
  std::vector<std::string> specials;
  specials.push_back("<SEP>");
  for (const auto& info : Lang::registry()) {
    specials.push_back(Lang::from_code(info.code).code_tag());
  }
  for (const auto& info : Lang::registry()) {
    specials.push_back(Lang::from_code(info.code).name_tag());
  }
  return specials;
}

BpeVocab train_bpe(const std::vector<std::string>& corpus, std::size_t target_size,
                   std::vector<std::string> specials) {
  if (corpus.empty()) throw Error(ErrorKind::EmptyCorpus, "nothing to train on");
  std::sort(specials.begin(), specials.end());
  specials.erase(std::unique(specials.begin(), specials.end()), specials.end());
  const std::size_t base = 256 + specials.size();
  if (target_size < base) {
    throw Error(ErrorKind::TargetTooSmall, "target_size " + std::to_string(target_size) +
                                               " must cover the base alphabet of " + std::to_string(base));
  }

  BpeVocab vocab;
  vocab.target_size = target_size;
  vocab.specials = specials;
  int next_id = 0;
  for (int b = 0; b < 256; ++b) vocab.token_to_id[std::string(1, static_cast<char>(b))] = next_id++;
  for (const auto& sp : specials) vocab.token_to_id[sp] = next_id++;

  // Specials never participate: occurrences are stripped from the training
  // sequences entirely, and no merge may spell one out.
  std::vector<std::vector<std::string>> sequences;
  for (const auto& text : corpus) {
    for (auto& segment : split_specials(text, specials)) {
      if (!segment.is_special && !segment.text.empty()) {
        sequences.push_back(to_byte_symbols(segment.text));
      }
    }
  }

  while (vocab.size() < target_size) {
    // Non-overlapping left-to-right count per pair type.
    std::map<std::pair<std::string, std::string>, long> counts;
    std::map<std::pair<std::string, std::string>, std::size_t> last_end;
    for (std::size_t s = 0; s < sequences.size(); ++s) {
      const auto& symbols = sequences[s];
      last_end.clear();
      for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
        std::pair<std::string, std::string> pair{symbols[i], symbols[i + 1]};
        auto it = last_end.find(pair);
        if (it != last_end.end() && i < it->second) continue; // overlaps previous count of this pair
        counts[pair] += 1;
        last_end[pair] = i + 2;
      }
    }

    // Highest count wins; ties break to the lexicographically smaller pair,
    // which std::map's key order already gives us on a left-to-right scan.
    const std::pair<std::string, std::string>* best = nullptr;
    long best_count = 1; // a pair must occur at least twice
    for (const auto& [pair, count] : counts) {
      std::string merged = pair.first + pair.second;
      if (std::binary_search(vocab.specials.begin(), vocab.specials.end(), merged)) continue;
      if (count > best_count) {
        best = &pair;
        best_count = count;
      }
    }
    if (best == nullptr) break;

    vocab.merges.push_back(*best);
    // Two distinct pairs can concatenate to the same token (("a","ab") and
    // ("aa","b") both spell "aab"); the token gets one id, both merges apply.
    if (vocab.token_to_id.emplace(best->first + best->second, next_id).second) ++next_id;
    for (auto& symbols : sequences) apply_merge(symbols, best->first, best->second);
  }
  return vocab;
}

std::vector<int> encode(const std::string& text, const BpeVocab& vocab) {
  std::vector<int> ids;
  for (const auto& segment : split_specials(text, vocab.specials)) {
    if (segment.is_special) {
      ids.push_back(vocab.id_of(segment.text));
      continue;
    }
    std::vector<std::string> symbols = to_byte_symbols(segment.text);
    for (const auto& [a, b] : vocab.merges) apply_merge(symbols, a, b);
    for (const auto& sym : symbols) ids.push_back(vocab.id_of(sym));
  }
  return ids;
}

std::string decode(const std::vector<int>& ids, const BpeVocab& vocab) {
  std::string out;
  for (int id : ids) out += vocab.token_of(id);
  return out;
}

double compression_rate(const std::vector<std::string>& corpus, const BpeVocab& vocab) {
  if (corpus.empty()) throw Error(ErrorKind::EmptyCorpus, "no corpus to measure");
  std::size_t chars = 0;
  std::size_t tokens = 0;
  for (const auto& text : corpus) {
    chars += codepoint_count(text);
    tokens += encode(text, vocab).size();
  }
  if (tokens == 0) throw Error(ErrorKind::EmptyCorpus, "corpus encodes to zero tokens");
  return static_cast<double>(chars) / static_cast<double>(tokens);
}

void save_vocab(const std::string& path, const BpeVocab& vocab) {
  json j;
  j["target_size"] = vocab.target_size;
  j["specials"] = vocab.specials;
  json merges = json::array();
  for (const auto& [a, b] : vocab.merges) {
    merges.push_back(json::array({bytes_to_printable(a), bytes_to_printable(b)}));
  }
  j["merges"] = std::move(merges);
  json tokens;
  for (const auto& [token, id] : vocab.token_to_id) tokens[bytes_to_printable(token)] = id;
  j["tokens"] = std::move(tokens);
  write_file_atomic(path, j.dump(2) + "\n");
}

BpeVocab load_vocab(const std::string& path) {
  json j = detail::parse_json(read_file(path), path);
  detail::require_object(j, path);
  detail::check_keys(j, {"target_size", "specials", "merges", "tokens"}, path);
  BpeVocab vocab;
  vocab.target_size = static_cast<std::size_t>(detail::get_integer(j, "target_size", path));
  vocab.specials = detail::get_string_array(j, "specials", path);
  const json& merges = detail::require_field(j, "merges", path);
  if (!merges.is_array()) throw Error(ErrorKind::SchemaViolation, path + ": 'merges' must be an array");
  for (const auto& m : merges) {
    if (!m.is_array() || m.size() != 2 || !m[0].is_string() || !m[1].is_string()) {
      throw Error(ErrorKind::SchemaViolation, path + ": each merge must be a [left, right] pair");
    }
    vocab.merges.emplace_back(printable_to_bytes(m[0].get<std::string>()),
                              printable_to_bytes(m[1].get<std::string>()));
  }
  const json& tokens = detail::require_field(j, "tokens", path);
  detail::require_object(tokens, path + ".tokens");
  for (auto it = tokens.begin(); it != tokens.end(); ++it) {
    if (!it.value().is_number_integer()) {
      throw Error(ErrorKind::SchemaViolation, path + ": token ids must be integers");
    }
    vocab.token_to_id[printable_to_bytes(it.key())] = it.value().get<int>();
  }
  return vocab;
}

} // namespace bpe
} // namespace seedline
