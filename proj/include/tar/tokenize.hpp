#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace tar {

inline bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// Lowercase alphanumeric runs; a '.' or ',' between two digits stays inside the
// token so "71.7" and "1,200" are single tokens.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (is_word_char(c)) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      continue;
    }
    const bool numeric_sep = (c == '.' || c == ',') && !cur.empty() && is_ascii_digit(cur.back()) &&
                             i + 1 < text.size() && is_ascii_digit(text[i + 1]);
    if (numeric_sep) {
      if (c == '.') cur += c;
      continue;
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline bool has_digit(std::string_view s) {
  for (char c : s) {
    if (is_ascii_digit(c)) return true;
  }
  return false;
}

}  // namespace tar
