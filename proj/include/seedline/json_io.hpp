#pragma once

#include <string>
#include <vector>

#include "seedline/types.hpp"

namespace seedline {

// One JSON object per line, keys always emitted in sorted order so reruns
// are byte-identical. Parsers are strict: a missing, extra, or mistyped
// field raises Error(SchemaViolation) carrying the 1-based line number when
// the caller reads from a file.

std::string to_json_line(const Document& doc);
std::string to_json_line(const SentencePair& pair);
std::string to_json_line(const RewardScore& score);

Document document_from_json_line(const std::string& line);
SentencePair pair_from_json_line(const std::string& line);
RewardScore reward_from_json_line(const std::string& line);

std::vector<Document> read_documents_jsonl(const std::string& path);
std::vector<SentencePair> read_pairs_jsonl(const std::string& path);
void write_documents_jsonl(const std::string& path, const std::vector<Document>& docs);
void write_pairs_jsonl(const std::string& path, const std::vector<SentencePair>& pairs);

// Plumbing shared by every writer: write to `<path>.tmp` in full, then rename.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);
std::vector<std::string> read_lines(const std::string& path);

} // namespace seedline
