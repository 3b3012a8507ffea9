#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace seedline {

struct LangInfo {
  std::string_view code; // ISO 639-1, lowercase
  std::string_view name; // English display name
};

// The 28 supported languages. `Lang` is an index into a fixed registry so the
// invalid-state problem ("enUS", "zh-Hant", ...) is solved at construction.
class Lang {
public:
  static constexpr int count = 28;

  static const std::array<LangInfo, count>& registry();

  // Accepts a two-letter code or a display name, case-insensitively.
  // Throws Error(UnknownLanguage) otherwise.
  static Lang lookup(std::string_view code_or_name);
  static Lang from_code(std::string_view code);
  static std::optional<Lang> try_from_code(std::string_view code);
  static Lang from_index(int idx);

  std::string_view code() const;
  std::string_view name() const;
  int index() const { return idx_; }

  // Delimiter spellings used by the packing formats: "<ZH>" and "<Chinese>".
  std::string code_tag() const;
  std::string name_tag() const;

  // Languages written without spaces between words get character-level
  // tokenization in the alignment model.
  bool char_tokenized() const;

  auto operator<=>(const Lang&) const = default;

private:
  explicit Lang(int idx) : idx_(static_cast<std::uint8_t>(idx)) {}
  std::uint8_t idx_ = 0;
};

} // namespace seedline
