#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace kmodel {

/// Canonical identifier for a concept name: ASCII-lowercased, apostrophes
/// dropped, every other run of non-word characters collapsed to a single
/// hyphen, leading and trailing hyphens trimmed. "Bayes' rule" becomes
/// "bayes-rule". Bytes >= 0x80 count as word characters.
std::string normalize_name(std::string_view name);

/// The words of a normalized name ("bayes-rule" -> {"bayes", "rule"}).
std::vector<std::string> name_words(std::string_view name);

std::string to_lower_ascii(std::string_view text);
std::string_view trim(std::string_view text);

/// Splits on a single character, keeping empty fields.
std::vector<std::string_view> split(std::string_view text, char sep);

/// One entry per line; blank lines and `#` comments skipped; entries trimmed.
std::vector<std::string> read_word_list(std::istream& in);
std::vector<std::string> read_word_list_file(const std::string& path);

inline bool is_word_byte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') ||
         (u >= 'A' && u <= 'Z') || u >= 0x80;
}

}  // namespace kmodel
