#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace seedline {

// Lenient UTF-8 decoding: a malformed byte decodes to its own byte value so
// counting never throws and every byte contributes exactly one codepoint.
std::vector<char32_t> decode_utf8(std::string_view text);

std::string encode_utf8(const std::vector<char32_t>& cps);
void append_utf8(std::string& out, char32_t cp);

std::size_t codepoint_count(std::string_view text);

} // namespace seedline
