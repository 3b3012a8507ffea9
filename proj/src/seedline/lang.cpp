#include "seedline/lang.hpp"

#include <algorithm>
#include <cctype>

#include "seedline/error.hpp"

namespace seedline {

namespace {

// Sorted by code so lookups can binary-search and iteration order is stable.
constexpr std::array<LangInfo, Lang::count> kRegistry = {{
    {"ar", "Arabic"},
    {"cs", "Czech"},
    {"da", "Danish"},
    {"de", "German"},
    {"en", "English"},
    {"es", "Spanish"},
    {"fi", "Finnish"},
    {"fr", "French"},
    {"hr", "Croatian"},
    {"hu", "Hungarian"},
    {"id", "Indonesian"},
    {"it", "Italian"},
    {"ja", "Japanese"},
    {"ko", "Korean"},
    {"ms", "Malay"},
    {"nb", "Norwegian Bokmal"},
    {"nl", "Dutch"},
    {"no", "Norwegian"},
    {"pl", "Polish"},
    {"pt", "Portuguese"},
    {"ro", "Romanian"},
    {"ru", "Russian"},
    {"sv", "Swedish"},
    {"th", "Thai"},
    {"tr", "Turkish"},
    {"uk", "Ukrainian"},
    {"vi", "Vietnamese"},
    {"zh", "Chinese"},
}};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

} // namespace

const std::array<LangInfo, Lang::count>& Lang::registry() { return kRegistry; }

Lang Lang::from_index(int idx) {
  if (idx < 0 || idx >= count) throw Error(ErrorKind::UnknownLanguage, "index out of range");
  return Lang(idx);
}

Lang Lang::from_code(std::string_view code) {
  std::string c = lower(code);
  for (int i = 0; i < count; ++i) {
    if (kRegistry[static_cast<size_t>(i)].code == c) return Lang(i);
  }
  throw Error(ErrorKind::UnknownLanguage, "no language with code '" + std::string(code) + "'");
}

std::optional<Lang> Lang::try_from_code(std::string_view code) {
  std::string c = lower(code);
  for (int i = 0; i < count; ++i) {
    if (kRegistry[static_cast<size_t>(i)].code == c) return Lang(i);
  }
  return std::nullopt;
}

Lang Lang::lookup(std::string_view code_or_name) {
  std::string key = lower(code_or_name);
  for (int i = 0; i < count; ++i) {
    const auto& info = kRegistry[static_cast<size_t>(i)];
    if (info.code == key || lower(info.name) == key) return Lang(i);
  }
  throw Error(ErrorKind::UnknownLanguage, "'" + std::string(code_or_name) + "' is not a registered language");
}

std::string_view Lang::code() const { return kRegistry[idx_].code; }
std::string_view Lang::name() const { return kRegistry[idx_].name; }

std::string Lang::code_tag() const {
  std::string tag = "<";
  for (char c : code()) tag += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  tag += ">";
  return tag;
}

std::string Lang::name_tag() const { return "<" + std::string(name()) + ">"; }

bool Lang::char_tokenized() const {
  std::string_view c = code();
  return c == "zh" || c == "ja" || c == "th";
}

} // namespace seedline
