#pragma once

// Internal glue around nlohmann::json shared by every loader: a parse wrapper
// that surfaces malformed input as the library's own Error, and strict field
// accessors that reject wrong types and unknown keys. Not installed; the
// public API never exposes json values.

#include <string>
#include <vector>

#include "json.hpp"

#include "seedline/error.hpp"

namespace seedline::detail {

using json = nlohmann::json;

inline json parse_json(const std::string& text, const std::string& context = "json") {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw Error(ErrorKind::SchemaViolation, context + ": malformed JSON");
  return j;
}

inline void require_object(const json& j, const std::string& context) {
  if (!j.is_object()) throw Error(ErrorKind::SchemaViolation, context + ": expected a JSON object");
}

void check_keys(const json& j, const std::vector<std::string>& allowed, const std::string& context);
const json& require_field(const json& j, const std::string& key, const std::string& context);
std::string get_string(const json& j, const std::string& key, const std::string& context);
double get_number(const json& j, const std::string& key, const std::string& context);
long get_integer(const json& j, const std::string& key, const std::string& context);
bool get_bool(const json& j, const std::string& key, const std::string& context);
std::vector<std::string> get_string_array(const json& j, const std::string& key,
                                          const std::string& context);

} // namespace seedline::detail
