#include "seedline/packing.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "seedline/error.hpp"
#include "json_detail.hpp"
#include "seedline/json_io.hpp"

namespace seedline {
namespace pack {

namespace {

const std::vector<PromptTemplate> kBuiltins = {
    {"std1", TemplateKind::Standard, "Translate the following text from <src> to <trg>:", " from <src>",
     true},
    {"std2", TemplateKind::Standard, "What does this sentence mean in <trg> from <src>:", " from <src>",
     true},
    {"std3", TemplateKind::Standard, "How do you translate this sentence into <trg> from <src>:",
     " from <src>", true},
    {"std4", TemplateKind::Standard, "Translate the following text to <trg>:", "", true},
    {"cot1", TemplateKind::CoT, "Translate the following <src> sentence into <trg> and explain it in detail:",
     "<src> ", true},
    {"cot2", TemplateKind::CoT, "First translate the <src> text into <trg> and then give the explanation:",
     "<src> ", true},
    {"cot3", TemplateKind::CoT,
     "Translate the following sentence into <trg> and try to explain this translation. The input is:", "",
     true},
};

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  if (from.empty()) return s;
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

const char* kind_to_string(TemplateKind kind) {
  return kind == TemplateKind::Standard ? "standard" : "cot";
}

TemplateKind kind_from_string(const std::string& s) {
  if (s == "standard") return TemplateKind::Standard;
  if (s == "cot") return TemplateKind::CoT;
  throw Error(ErrorKind::SchemaViolation, "unknown template kind: " + s);
}

} // namespace

const char* to_string(DelimiterStrategy strategy) {
  switch (strategy) {
    case DelimiterStrategy::Sep: return "sep";
    case DelimiterStrategy::NaturalLanguage: return "natural_language";
    case DelimiterStrategy::LanguageName: return "language_name";
    case DelimiterStrategy::LangCode: return "lang_code";
  }
  throw Error(ErrorKind::SchemaViolation, "bad delimiter strategy value");
}

DelimiterStrategy strategy_from_string(const std::string& s) {
  if (s == "sep") return DelimiterStrategy::Sep;
  if (s == "natural_language") return DelimiterStrategy::NaturalLanguage;
  if (s == "language_name") return DelimiterStrategy::LanguageName;
  if (s == "lang_code") return DelimiterStrategy::LangCode;
  throw Error(ErrorKind::SchemaViolation, "unknown delimiter strategy: " + s);
}

const char* to_string(SegmentRole role) {
  switch (role) {
    case SegmentRole::Tag: return "tag";
    case SegmentRole::Text: return "text";
    case SegmentRole::Prompt: return "prompt";
  }
  throw Error(ErrorKind::SchemaViolation, "bad segment role value");
}

const std::vector<PromptTemplate>& builtin_templates() { return kBuiltins; }

const PromptTemplate& find_template(const std::vector<PromptTemplate>& library, const std::string& id) {
  for (const auto& tmpl : library) {
    if (tmpl.id == id) return tmpl;
  }
  throw Error(ErrorKind::MissingTemplate, "no template with id: " + id);
}

std::vector<PromptTemplate> load_templates(const std::string& path) {
  auto doc = detail::parse_json(read_file(path));
  detail::require_object(doc, "template library");
  detail::check_keys(doc, {"templates"}, "template library");
  if (!doc["templates"].is_array()) {
    throw Error(ErrorKind::SchemaViolation, "templates must be an array");
  }
  std::vector<PromptTemplate> out;
  for (const auto& item : doc["templates"]) {
    detail::require_object(item, "template");
    detail::check_keys(item, {"id", "kind", "pattern", "src_elision", "include_src_lang"}, "template");
    PromptTemplate tmpl;
    tmpl.id = detail::get_string(item, "id", "template");
    tmpl.kind = kind_from_string(detail::get_string(item, "kind", "template"));
    tmpl.pattern = detail::get_string(item, "pattern", "template");
    tmpl.src_elision = detail::get_string(item, "src_elision", "template");
    tmpl.include_src_lang = detail::get_bool(item, "include_src_lang", "template");
    out.push_back(std::move(tmpl));
  }
  if (out.empty()) throw Error(ErrorKind::SchemaViolation, "template library is empty");
  return out;
}

void save_templates(const std::string& path, const std::vector<PromptTemplate>& templates) {
  detail::json doc;
  doc["templates"] = detail::json::array();
  for (const auto& tmpl : templates) {
    detail::json item;
    item["id"] = tmpl.id;
    item["kind"] = kind_to_string(tmpl.kind);
    item["pattern"] = tmpl.pattern;
    item["src_elision"] = tmpl.src_elision;
    item["include_src_lang"] = tmpl.include_src_lang;
    doc["templates"].push_back(std::move(item));
  }
  write_file_atomic(path, doc.dump(2) + "\n");
}

std::string render_prompt(const PromptTemplate& tmpl, Lang src, Lang tgt, const std::string& text) {
  std::string pattern = tmpl.pattern;
  if (!tmpl.include_src_lang && !tmpl.src_elision.empty()) {
    auto pos = pattern.find(tmpl.src_elision);
    if (pos != std::string::npos) pattern.erase(pos, tmpl.src_elision.size());
  }

  // Validate before substitution so placeholders smuggled in via text are not
  // flagged and stray template placeholders are.
  std::size_t open = pattern.find('<');
  while (open != std::string::npos) {
    auto close = pattern.find('>', open + 1);
    if (close == std::string::npos) break;
    std::string name = pattern.substr(open + 1, close - open - 1);
    if (name != "src" && name != "trg" && name != "text") {
      throw Error(ErrorKind::UnknownPlaceholder, "template " + tmpl.id + " uses <" + name + ">");
    }
    if (name == "src" && !tmpl.include_src_lang) {
      throw Error(ErrorKind::UnknownPlaceholder,
                  "template " + tmpl.id + " retains <src> with include_src_lang=false");
    }
    open = pattern.find('<', close + 1);
  }

  std::string rendered = replace_all(pattern, "<src>", std::string(src.name()));
  rendered = replace_all(rendered, "<trg>", std::string(tgt.name()));
  if (rendered.find("<text>") != std::string::npos) {
    rendered = replace_all(rendered, "<text>", text);
  } else {
    rendered += text;
  }
  return rendered;
}

FormattedItem format_pair(const SentencePair& pair, DelimiterStrategy strategy,
                          const PromptTemplate* tmpl) {
  FormattedItem item;
  switch (strategy) {
    case DelimiterStrategy::Sep:
      item.segments = {{SegmentRole::Text, pair.src_text},
                       {SegmentRole::Tag, "<SEP>"},
                       {SegmentRole::Text, pair.tgt_text}};
      break;
    case DelimiterStrategy::LangCode:
      item.segments = {{SegmentRole::Tag, pair.src_lang.code_tag()},
                       {SegmentRole::Text, pair.src_text},
                       {SegmentRole::Tag, pair.tgt_lang.code_tag()},
                       {SegmentRole::Text, pair.tgt_text}};
      break;
    case DelimiterStrategy::LanguageName:
      item.segments = {{SegmentRole::Tag, pair.src_lang.name_tag()},
                       {SegmentRole::Text, pair.src_text},
                       {SegmentRole::Tag, pair.tgt_lang.name_tag()},
                       {SegmentRole::Text, pair.tgt_text}};
      break;
    case DelimiterStrategy::NaturalLanguage: {
      if (tmpl == nullptr) {
        throw Error(ErrorKind::MissingTemplate, "natural_language formatting requires a template");
      }
      std::string prompt = render_prompt(*tmpl, pair.src_lang, pair.tgt_lang, pair.src_text);
      item.segments = {{SegmentRole::Prompt, prompt + "\n"}, {SegmentRole::Text, pair.tgt_text}};
      break;
    }
  }
  for (const auto& seg : item.segments) item.text += seg.content;
  return item;
}

ParsedPair parse_lang_code(const std::string& formatted) {
  auto tag_at = [&](std::size_t pos) -> std::optional<Lang> {
    if (pos + 4 > formatted.size()) return std::nullopt;
    if (formatted[pos] != '<' || formatted[pos + 3] != '>') return std::nullopt;
    char a = formatted[pos + 1];
    char b = formatted[pos + 2];
    if (a < 'A' || a > 'Z' || b < 'A' || b > 'Z') return std::nullopt;
    std::string code{static_cast<char>(a - 'A' + 'a'), static_cast<char>(b - 'A' + 'a')};
    return Lang::try_from_code(code);
  };

  auto src = tag_at(0);
  if (!src) throw Error(ErrorKind::SchemaViolation, "formatted pair must start with a <XX> tag");
  std::size_t body = 4;
  std::size_t second = std::string::npos;
  for (std::size_t i = body; i + 4 <= formatted.size(); ++i) {
    if (tag_at(i)) {
      second = i;
      break;
    }
  }
  if (second == std::string::npos) {
    throw Error(ErrorKind::SchemaViolation, "formatted pair is missing the target <XX> tag");
  }
  ParsedPair out;
  out.src_lang = *src;
  out.tgt_lang = *tag_at(second);
  out.src_text = formatted.substr(body, second - body);
  out.tgt_text = formatted.substr(second + 4);
  return out;
}

const char* to_string(CotViolation violation) {
  switch (violation) {
    case CotViolation::MissingSummary: return "missing_summary";
    case CotViolation::MissingTermNotes: return "missing_term_notes";
    case CotViolation::EmptyTermNote: return "empty_term_note";
    case CotViolation::MissingDecision: return "missing_decision";
    case CotViolation::MissingTranslation: return "missing_translation";
  }
  throw Error(ErrorKind::SchemaViolation, "bad cot violation value");
}

std::vector<CotViolation> validate_cot(const CotRecord& record) {
  std::vector<CotViolation> violations;
  if (record.summary.empty()) violations.push_back(CotViolation::MissingSummary);
  if (record.term_notes.empty()) {
    violations.push_back(CotViolation::MissingTermNotes);
  } else {
    for (const auto& [term, explanation] : record.term_notes) {
      if (term.empty() || explanation.empty()) {
        violations.push_back(CotViolation::EmptyTermNote);
        break;
      }
    }
  }
  if (record.translation_decision.empty()) violations.push_back(CotViolation::MissingDecision);
  if (record.final_translation.empty()) violations.push_back(CotViolation::MissingTranslation);
  return violations;
}

std::vector<PackedSequence> pack_items(const std::vector<FormattedItem>& items,
                                       const bpe::BpeVocab& vocab, std::size_t max_seq_len,
                                       DelimiterStrategy strategy) {
  if (max_seq_len < 16) throw Error(ErrorKind::ConfigError, "max_seq_len must be at least 16");

  std::vector<PackedSequence> out;
  PackedSequence current;
  current.strategy = strategy;

  auto flush = [&] {
    if (current.token_len > 0) {
      out.push_back(std::move(current));
      current = PackedSequence{};
      current.strategy = strategy;
    }
  };

  for (const auto& item : items) {
    auto ids = bpe::encode(item.text, vocab);
    if (ids.empty()) continue;
    if (ids.size() <= max_seq_len) {
      if (current.token_len + ids.size() > max_seq_len) flush();
      current.segments.insert(current.segments.end(), item.segments.begin(), item.segments.end());
      current.token_ids.insert(current.token_ids.end(), ids.begin(), ids.end());
      current.token_len += ids.size();
      continue;
    }
    // Oversized item: full chunks become sequences of their own, the short
    // tail starts a fresh open sequence.
    flush();
    for (std::size_t off = 0; off < ids.size(); off += max_seq_len) {
      std::size_t len = std::min(max_seq_len, ids.size() - off);
      std::vector<int> chunk(ids.begin() + static_cast<std::ptrdiff_t>(off),
                             ids.begin() + static_cast<std::ptrdiff_t>(off + len));
      std::string text = bpe::decode(chunk, vocab);
      current.segments.push_back({SegmentRole::Text, std::move(text)});
      current.token_ids = std::move(chunk);
      current.token_len = len;
      if (len == max_seq_len) flush();
    }
  }
  flush();
  return out;
}

std::string packed_to_json_line(const PackedSequence& seq) {
  detail::json doc;
  doc["strategy"] = to_string(seq.strategy);
  doc["token_len"] = seq.token_len;
  doc["segments"] = detail::json::array();
  for (const auto& seg : seq.segments) {
    doc["segments"].push_back({{"role", to_string(seg.role)}, {"content", seg.content}});
  }
  return doc.dump();
}

std::string sidecar_line(const PackedSequence& seq) {
  std::string line;
  for (std::size_t i = 0; i < seq.token_ids.size(); ++i) {
    if (i > 0) line += ' ';
    line += std::to_string(seq.token_ids[i]);
  }
  return line;
}

std::vector<SentencePair> reject_multiparallel(const std::vector<SentencePair>& records, bool flag) {
  if (!flag) return records;
  std::map<std::string, std::set<std::string>> directions;
  std::map<std::string, std::string> first_direction;
  auto key_of = [](const SentencePair& p) { return std::string(p.src_lang.code()) + "\x1f" + p.src_text; };
  for (const auto& rec : records) {
    auto key = key_of(rec);
    auto [it, inserted] = first_direction.emplace(key, rec.direction());
    (void)it;
    (void)inserted;
    directions[key].insert(rec.direction());
  }
  std::vector<SentencePair> out;
  for (const auto& rec : records) {
    auto key = key_of(rec);
    if (directions[key].size() <= 2 || rec.direction() == first_direction[key]) {
      out.push_back(rec);
    }
  }
  return out;
}

} // namespace pack
} // namespace seedline
