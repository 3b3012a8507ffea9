#include "seedline/json_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json_detail.hpp"

namespace seedline::detail {

void check_keys(const json& j, const std::vector<std::string>& allowed, const std::string& context) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const auto& key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) throw Error(ErrorKind::SchemaViolation, context + ": unexpected field '" + it.key() + "'");
  }
}

const json& require_field(const json& j, const std::string& key, const std::string& context) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorKind::SchemaViolation, context + ": missing field '" + key + "'");
  return *it;
}

std::string get_string(const json& j, const std::string& key, const std::string& context) {
  const json& v = require_field(j, key, context);
  if (!v.is_string()) throw Error(ErrorKind::SchemaViolation, context + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

double get_number(const json& j, const std::string& key, const std::string& context) {
  const json& v = require_field(j, key, context);
  if (!v.is_number()) throw Error(ErrorKind::SchemaViolation, context + ": field '" + key + "' must be a number");
  return v.get<double>();
}

long get_integer(const json& j, const std::string& key, const std::string& context) {
  const json& v = require_field(j, key, context);
  if (!v.is_number_integer()) {
    throw Error(ErrorKind::SchemaViolation, context + ": field '" + key + "' must be an integer");
  }
  return v.get<long>();
}

bool get_bool(const json& j, const std::string& key, const std::string& context) {
  const json& v = require_field(j, key, context);
  if (!v.is_boolean()) throw Error(ErrorKind::SchemaViolation, context + ": field '" + key + "' must be a boolean");
  return v.get<bool>();
}

std::vector<std::string> get_string_array(const json& j, const std::string& key, const std::string& context) {
  const json& v = require_field(j, key, context);
  if (!v.is_array()) throw Error(ErrorKind::SchemaViolation, context + ": field '" + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& item : v) {
    if (!item.is_string()) {
      throw Error(ErrorKind::SchemaViolation, context + ": field '" + key + "' must contain only strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

} // namespace seedline::detail

namespace seedline {

using detail::json;

namespace {

json document_to_json(const Document& doc) {
  json j;
  j["id"] = doc.id;
  j["lang"] = std::string(doc.lang.code());
  j["text"] = doc.text;
  j["tags"] = doc.tags;
  j["tier"] = to_string(doc.tier);
  j["source"] = doc.source;
  j["char_count"] = doc.char_count;
  return j;
}

json pair_to_json(const SentencePair& pair) {
  json j;
  j["id"] = pair.id;
  j["src_lang"] = std::string(pair.src_lang.code());
  j["tgt_lang"] = std::string(pair.tgt_lang.code());
  j["src_text"] = pair.src_text;
  j["tgt_text"] = pair.tgt_text;
  j["lid_confidence"] = json::array({pair.lid_confidence_src, pair.lid_confidence_tgt});
  if (pair.align_score.has_value()) {
    j["align_score"] = *pair.align_score;
  } else {
    j["align_score"] = nullptr;
  }
  j["round"] = pair.round;
  j["provenance"] = to_string(pair.provenance);
  return j;
}

json reward_to_json(const RewardScore& score) {
  json j;
  j["kind"] = score.kind;
  j["value"] = score.value;
  j["components"] = score.components;
  j["metadata"] = score.metadata;
  return j;
}

Document document_from_json(const json& j, const std::string& context) {
  detail::require_object(j, context);
  detail::check_keys(j, {"id", "lang", "text", "tags", "tier", "source", "char_count"}, context);
  Document doc;
  doc.id = detail::get_string(j, "id", context);
  doc.lang = Lang::from_code(detail::get_string(j, "lang", context));
  doc.text = detail::get_string(j, "text", context);
  doc.tags = detail::get_string_array(j, "tags", context);
  doc.tier = tier_from_string(detail::get_string(j, "tier", context));
  doc.source = detail::get_string(j, "source", context);
  long count = detail::get_integer(j, "char_count", context);
  if (count < 0) throw Error(ErrorKind::SchemaViolation, context + ": char_count must be >= 0");
  doc.char_count = static_cast<std::size_t>(count);
  return doc;
}

SentencePair pair_from_json(const json& j, const std::string& context) {
  detail::require_object(j, context);
  detail::check_keys(j,
                     {"id", "src_lang", "tgt_lang", "src_text", "tgt_text", "lid_confidence",
                      "align_score", "round", "provenance"},
                     context);
  SentencePair pair;
  pair.id = detail::get_string(j, "id", context);
  pair.src_lang = Lang::from_code(detail::get_string(j, "src_lang", context));
  pair.tgt_lang = Lang::from_code(detail::get_string(j, "tgt_lang", context));
  pair.src_text = detail::get_string(j, "src_text", context);
  pair.tgt_text = detail::get_string(j, "tgt_text", context);
  const json& lid = detail::require_field(j, "lid_confidence", context);
  if (!lid.is_array() || lid.size() != 2 || !lid[0].is_number() || !lid[1].is_number()) {
    throw Error(ErrorKind::SchemaViolation, context + ": lid_confidence must be [src, tgt]");
  }
  pair.lid_confidence_src = lid[0].get<double>();
  pair.lid_confidence_tgt = lid[1].get<double>();
  const json& align = detail::require_field(j, "align_score", context);
  if (align.is_null()) {
    pair.align_score.reset();
  } else if (align.is_number()) {
    pair.align_score = align.get<double>();
  } else {
    throw Error(ErrorKind::SchemaViolation, context + ": align_score must be a number or null");
  }
  pair.round = static_cast<int>(detail::get_integer(j, "round", context));
  if (pair.round < 0) throw Error(ErrorKind::SchemaViolation, context + ": round must be >= 0");
  pair.provenance = provenance_from_string(detail::get_string(j, "provenance", context));
  return pair;
}

RewardScore reward_from_json(const json& j, const std::string& context) {
  detail::require_object(j, context);
  detail::check_keys(j, {"kind", "value", "components", "metadata"}, context);
  RewardScore score;
  score.kind = detail::get_string(j, "kind", context);
  score.value = detail::get_number(j, "value", context);
  const json& comps = detail::require_field(j, "components", context);
  detail::require_object(comps, context + ".components");
  for (auto it = comps.begin(); it != comps.end(); ++it) {
    if (!it.value().is_number()) {
      throw Error(ErrorKind::SchemaViolation, context + ": component '" + it.key() + "' must be a number");
    }
    score.components[it.key()] = it.value().get<double>();
  }
  const json& meta = detail::require_field(j, "metadata", context);
  detail::require_object(meta, context + ".metadata");
  for (auto it = meta.begin(); it != meta.end(); ++it) {
    if (!it.value().is_string()) {
      throw Error(ErrorKind::SchemaViolation, context + ": metadata '" + it.key() + "' must be a string");
    }
    score.metadata[it.key()] = it.value().get<std::string>();
  }
  return score;
}

template <typename T, typename FromJson>
std::vector<T> read_jsonl(const std::string& path, FromJson from_json) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
  std::vector<T> out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      json j = detail::parse_json(line, path + ":" + std::to_string(line_no));
      out.push_back(from_json(j, path + ":" + std::to_string(line_no)));
    } catch (Error& e) {
      e.line_number = line_no;
      throw;
    }
  }
  return out;
}

} // namespace

std::string to_json_line(const Document& doc) { return document_to_json(doc).dump(); }
std::string to_json_line(const SentencePair& pair) { return pair_to_json(pair).dump(); }
std::string to_json_line(const RewardScore& score) { return reward_to_json(score).dump(); }

Document document_from_json_line(const std::string& line) {
  return document_from_json(detail::parse_json(line, "document"), "document");
}

SentencePair pair_from_json_line(const std::string& line) {
  return pair_from_json(detail::parse_json(line, "pair"), "pair");
}

RewardScore reward_from_json_line(const std::string& line) {
  return reward_from_json(detail::parse_json(line, "reward"), "reward");
}

std::vector<Document> read_documents_jsonl(const std::string& path) {
  return read_jsonl<Document>(path, document_from_json);
}

std::vector<SentencePair> read_pairs_jsonl(const std::string& path) {
  return read_jsonl<SentencePair>(path, pair_from_json);
}

void write_documents_jsonl(const std::string& path, const std::vector<Document>& docs) {
  std::string out;
  for (const auto& doc : docs) {
    out += to_json_line(doc);
    out += '\n';
  }
  write_file_atomic(path, out);
}

void write_pairs_jsonl(const std::string& path, const std::vector<SentencePair>& pairs) {
  std::string out;
  for (const auto& pair : pairs) {
    out += to_json_line(pair);
    out += '\n';
  }
  write_file_atomic(path, out);
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot open '" + tmp + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorKind::IoError, "short write to '" + tmp + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error(ErrorKind::IoError, "rename '" + tmp + "' -> '" + path + "': " + ec.message());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

} // namespace seedline
