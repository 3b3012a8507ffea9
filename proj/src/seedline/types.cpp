#include "seedline/types.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "seedline/error.hpp"
#include "seedline/utf8.hpp"

namespace seedline {

const char* to_string(QualityTier tier) {
  switch (tier) {
    case QualityTier::Unassigned: return "unassigned";
    case QualityTier::High: return "high";
    case QualityTier::Medium: return "medium";
    case QualityTier::Low: return "low";
  }
  return "unassigned";
}

QualityTier tier_from_string(const std::string& s) {
  if (s == "unassigned") return QualityTier::Unassigned;
  if (s == "high") return QualityTier::High;
  if (s == "medium") return QualityTier::Medium;
  if (s == "low") return QualityTier::Low;
  throw Error(ErrorKind::SchemaViolation, "unknown quality tier '" + s + "'");
}

const char* to_string(Provenance prov) {
  switch (prov) {
    case Provenance::Seed: return "seed";
    case Provenance::PseudoParallel: return "pseudo_parallel";
    case Provenance::Rewritten: return "rewritten";
  }
  return "seed";
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "seed") return Provenance::Seed;
  if (s == "pseudo_parallel") return Provenance::PseudoParallel;
  if (s == "rewritten") return Provenance::Rewritten;
  throw Error(ErrorKind::SchemaViolation, "unknown provenance '" + s + "'");
}

void Document::normalize() {
  std::sort(tags.begin(), tags.end());
  tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
  char_count = codepoint_count(text);
}

Document make_document(std::string id, Lang lang, std::string text,
                       std::vector<std::string> tags, std::string source) {
  Document doc;
  doc.id = std::move(id);
  doc.lang = lang;
  doc.text = std::move(text);
  doc.tags = std::move(tags);
  doc.source = std::move(source);
  doc.normalize();
  return doc;
}

std::string SentencePair::direction() const {
  return std::string(src_lang.code()) + "-" + std::string(tgt_lang.code());
}

double round2(double x) {
  // Half-up, implemented without std::round so the rule is explicit: .005
  // at the binary value actually stored decides the direction.
  return std::floor(x * 100.0 + 0.5) / 100.0;
}

std::string format_real(double x) {
  // General format, not plain shortest: plain to_chars would print 0.0003 as
  // "3e-04" because it is one byte shorter, and these strings reach users.
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general);
  (void)ec;
  return std::string(buf, ptr);
}

} // namespace seedline
