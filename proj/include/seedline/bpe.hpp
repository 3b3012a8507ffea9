#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace seedline {
namespace bpe {

// Byte-level BPE. The base alphabet is all 256 byte values, so every UTF-8
// string encodes without an unknown-token path. Reserved special tokens
// (delimiter tags) are registered before training and never produced or
// consumed by merges.

struct BpeVocab {
  std::vector<std::pair<std::string, std::string>> merges; // acquisition order
  std::map<std::string, int> token_to_id;                  // token bytes -> id
  std::vector<std::string> specials;                       // registered, never merged
  std::size_t target_size = 0;

  int id_of(const std::string& token) const;
  const std::string& token_of(int id) const;
  std::size_t size() const { return token_to_id.size(); }

private:
  mutable std::vector<std::string> id_to_token_; // lazily built reverse map
  void build_reverse() const;
};

// The packing delimiters: <SEP>, all 28 <XX> code tags, all 28 <Name> tags.
std::vector<std::string> default_special_tokens();

// Greedy highest-count pair merging with non-overlapping left-to-right
// counting; ties break to the lexicographically smaller pair; training stops
// at target_size or when no pair occurs at least twice.
BpeVocab train_bpe(const std::vector<std::string>& corpus, std::size_t target_size,
                   std::vector<std::string> specials = default_special_tokens());

std::vector<int> encode(const std::string& text, const BpeVocab& vocab);
std::string decode(const std::vector<int>& ids, const BpeVocab& vocab);

// Characters (codepoints) per token over a corpus.
double compression_rate(const std::vector<std::string>& corpus, const BpeVocab& vocab);

void save_vocab(const std::string& path, const BpeVocab& vocab);
BpeVocab load_vocab(const std::string& path);

} // namespace bpe
} // namespace seedline
