#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seedline/lang.hpp"

namespace seedline {

enum class QualityTier { Unassigned, High, Medium, Low };
enum class Provenance { Seed, PseudoParallel, Rewritten };

const char* to_string(QualityTier tier);
const char* to_string(Provenance prov);
QualityTier tier_from_string(const std::string& s);
Provenance provenance_from_string(const std::string& s);

struct Document {
  std::string id;
  Lang lang = Lang::from_code("en");
  std::string text;
  std::vector<std::string> tags; // kept sorted + deduplicated
  QualityTier tier = QualityTier::Unassigned;
  std::string source;
  std::size_t char_count = 0; // codepoints, not bytes

  void normalize(); // sorts/dedups tags, recomputes char_count

  bool operator==(const Document&) const = default;
};

Document make_document(std::string id, Lang lang, std::string text,
                       std::vector<std::string> tags = {}, std::string source = {});

struct SentencePair {
  std::string id;
  Lang src_lang = Lang::from_code("en");
  Lang tgt_lang = Lang::from_code("de");
  std::string src_text;
  std::string tgt_text;
  double lid_confidence_src = 1.0;
  double lid_confidence_tgt = 1.0;
  std::optional<double> align_score;
  int round = 0;
  Provenance provenance = Provenance::Seed;

  std::string direction() const; // "en-de"

  bool operator==(const SentencePair&) const = default;
};

struct RewardScore {
  std::string kind; // "dual", "preference", ...
  double value = 0.0;
  std::map<std::string, double> components;
  std::map<std::string, std::string> metadata;

  bool operator==(const RewardScore&) const = default;
};

// Round-half-up at two decimals; the convention every reported average uses.
double round2(double x);

// Shortest decimal that round-trips (std::to_chars). All CLI numeric output
// and JSON reals go through this so reruns are byte-identical.
std::string format_real(double x);

} // namespace seedline
