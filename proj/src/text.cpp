#include "kmodel/text.hpp"

#include <fstream>

#include "kmodel/error.hpp"

namespace kmodel {

std::string to_lower_ascii(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string normalize_name(std::string_view name) {
  std::string out;
  bool pending_hyphen = false;
  for (char c : name) {
    if (c == '\'') continue;
    if (is_word_byte(c)) {
      if (pending_hyphen && !out.empty()) out.push_back('-');
      pending_hyphen = false;
      out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    } else {
      pending_hyphen = true;
    }
  }
  return out;
}

std::vector<std::string> name_words(std::string_view name) {
  std::vector<std::string> words;
  const auto normalized = normalize_name(name);
  for (auto part : split(normalized, '-')) {
    if (!part.empty()) words.emplace_back(part);
  }
  return words;
}

std::string_view trim(std::string_view text) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto first = text.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(ws);
  return text.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string> read_word_list(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto entry = trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    out.emplace_back(entry);
  }
  return out;
}

std::vector<std::string> read_word_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open word list '" + path + "'");
  return read_word_list(in);
}

}  // namespace kmodel
