#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

namespace verbatim::text {

inline bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool has_space(std::string_view s) noexcept {
  return std::any_of(s.begin(), s.end(), is_space);
}

// ASCII-only lowercasing; multi-byte UTF-8 sequences pass through untouched.
inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

inline std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline bool ends_with(std::string_view s, std::string_view suffix) noexcept {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// Sentence punctuation removed at scoring time; the horizontal ellipsis is
// matched as its UTF-8 byte sequence.
inline constexpr std::string_view kSentencePunct = ".?,!;:";
inline constexpr std::string_view kEllipsis = "\xE2\x80\xA6";

inline bool has_sentence_punct(std::string_view s) noexcept {
  return s.find_first_of(kSentencePunct) != std::string_view::npos ||
         s.find(kEllipsis) != std::string_view::npos;
}

inline bool is_digits(std::string_view s) noexcept {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace verbatim::text
