#pragma once

#include <optional>
#include <string>
#include <vector>

#include "seedline/bpe.hpp"
#include "seedline/types.hpp"

namespace seedline {
namespace pack {

enum class DelimiterStrategy { Sep, NaturalLanguage, LanguageName, LangCode };

const char* to_string(DelimiterStrategy strategy);
DelimiterStrategy strategy_from_string(const std::string& s);

enum class TemplateKind { Standard, CoT };

struct PromptTemplate {
  std::string id;
  TemplateKind kind = TemplateKind::Standard;
  // Placeholders: <src>, <trg> (display names) and <text>. src_elision is the
  // exact substring removed when include_src_lang is false; empty for
  // source-free templates.
  std::string pattern;
  std::string src_elision;
  bool include_src_lang = true;
};

// The built-in library: 4 standard + 3 CoT templates, ids std1..std4 and
// cot1..cot3, patterns pinned byte-for-byte by golden tests.
const std::vector<PromptTemplate>& builtin_templates();
const PromptTemplate& find_template(const std::vector<PromptTemplate>& library, const std::string& id);

std::vector<PromptTemplate> load_templates(const std::string& path);
void save_templates(const std::string& path, const std::vector<PromptTemplate>& templates);

std::string render_prompt(const PromptTemplate& tmpl, Lang src, Lang tgt, const std::string& text);

enum class SegmentRole { Tag, Text, Prompt };

const char* to_string(SegmentRole role);

struct Segment {
  SegmentRole role = SegmentRole::Text;
  std::string content;

  bool operator==(const Segment&) const = default;
};

struct FormattedItem {
  std::string text; // concatenation of segments
  std::vector<Segment> segments;
};

FormattedItem format_pair(const SentencePair& pair, DelimiterStrategy strategy,
                          const PromptTemplate* tmpl = nullptr);

// Inverse of the LangCode grammar. Total whenever the embedded texts contain
// no <XX>-shaped substring that spells a registry code tag.
struct ParsedPair {
  Lang src_lang = Lang::from_code("en");
  Lang tgt_lang = Lang::from_code("de");
  std::string src_text;
  std::string tgt_text;
};

ParsedPair parse_lang_code(const std::string& formatted);

struct CotRecord {
  std::string summary;
  std::vector<std::pair<std::string, std::string>> term_notes; // (term, explanation)
  std::string translation_decision;
  std::string final_translation;
};

enum class CotViolation {
  MissingSummary,
  MissingTermNotes,
  EmptyTermNote,
  MissingDecision,
  MissingTranslation,
};

const char* to_string(CotViolation violation);

std::vector<CotViolation> validate_cot(const CotRecord& record);

struct PackedSequence {
  std::vector<Segment> segments;
  std::vector<int> token_ids;
  std::size_t token_len = 0;
  DelimiterStrategy strategy = DelimiterStrategy::LangCode;
};

// Greedy first-fit in input order. Items above max_seq_len split at token
// boundaries into ceil(len/max) chunks; the final short chunk stays open for
// subsequent items. Total tokens are conserved exactly.
std::vector<PackedSequence> pack_items(const std::vector<FormattedItem>& items,
                                       const bpe::BpeVocab& vocab, std::size_t max_seq_len,
                                       DelimiterStrategy strategy);

std::string packed_to_json_line(const PackedSequence& seq);
std::string sidecar_line(const PackedSequence& seq);

// With flag set, any source sentence that fans out into more than two
// directions keeps only its first-seen direction's records.
std::vector<SentencePair> reject_multiparallel(const std::vector<SentencePair>& records, bool flag);

} // namespace pack
} // namespace seedline
