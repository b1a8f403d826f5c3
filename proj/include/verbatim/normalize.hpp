#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "verbatim/errors.hpp"
#include "verbatim/lexicon.hpp"
#include "verbatim/text.hpp"

namespace verbatim {

struct NormalizationConfig {
  FillerLexicon filler_lexicon;
  bool verbalize_numbers = true;
  bool strip_partial_hyphen = true;
  bool lowercase = true;
};

using TokenSequence = std::vector<std::string>;

namespace detail {

inline constexpr std::array<std::string_view, 20> kUnits = {
    "zero",    "one",     "two",       "three",    "four",     "five",    "six",
    "seven",   "eight",   "nine",      "ten",      "eleven",   "twelve",  "thirteen",
    "fourteen", "fifteen", "sixteen",  "seventeen", "eighteen", "nineteen"};

inline constexpr std::array<std::string_view, 10> kTens = {
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"};

inline constexpr std::array<std::string_view, 5> kScales = {"", "thousand", "million", "billion",
                                                            "trillion"};

// 1..999
inline void append_group(std::uint64_t n, std::vector<std::string>& out) {
  if (n >= 100) {
    out.emplace_back(kUnits[n / 100]);
    out.emplace_back("hundred");
    n %= 100;
  }
  if (n >= 20) {
    out.emplace_back(kTens[n / 10]);
    n %= 10;
    if (n) out.emplace_back(kUnits[n]);
  } else if (n) {
    out.emplace_back(kUnits[n]);
  }
}

}  // namespace detail

/// English cardinal for a digit string below 10^15: lowercase, no "and",
/// compounds split ("25" -> twenty five). Leading zeros are ignored.
inline std::vector<std::string> number_to_words(std::string_view digits) {
  if (!text::is_digits(digits)) {
    throw FormatError("number_to_words: '" + std::string(digits) + "' is not a digit string");
  }
  auto first = digits.find_first_not_of('0');
  if (first == std::string_view::npos) return {"zero"};
  digits.remove_prefix(first);
  if (digits.size() > 15) {
    throw RangeError("number_to_words: '" + std::string(digits) + "' is not below 10^15");
  }
  std::uint64_t value = 0;
  for (char c : digits) value = value * 10 + static_cast<std::uint64_t>(c - '0');

  std::array<std::uint64_t, 5> groups{};
  for (auto& g : groups) {
    g = value % 1000;
    value /= 1000;
  }
  std::vector<std::string> out;
  for (std::size_t i = groups.size(); i-- > 0;) {
    if (!groups[i]) continue;
    detail::append_group(groups[i], out);
    if (i) out.emplace_back(detail::kScales[i]);
  }
  return out;
}

namespace detail {

inline std::string strip_sentence_punct(std::string_view tok) {
  std::string out;
  out.reserve(tok.size());
  for (std::size_t i = 0; i < tok.size();) {
    if (tok.compare(i, text::kEllipsis.size(), text::kEllipsis) == 0) {
      i += text::kEllipsis.size();
    } else if (text::kSentencePunct.find(tok[i]) != std::string_view::npos) {
      ++i;
    } else {
      out += tok[i++];
    }
  }
  return out;
}

}  // namespace detail

/// Scoring-time canonical form: lowercase, drop sentence punctuation and bare
/// "#", strip partial-word hyphens, verbalize digit strings, drop fillers.
inline TokenSequence normalize(std::string_view input, const NormalizationConfig& cfg = {}) {
  TokenSequence out;
  for (auto& raw : text::split_ws(input)) {
    std::string tok = cfg.lowercase ? text::ascii_lower(raw) : std::move(raw);
    tok = detail::strip_sentence_punct(tok);
    if (cfg.strip_partial_hyphen) {
      while (!tok.empty() && tok.back() == '-') tok.pop_back();
    }
    if (tok.empty() || tok == "#") continue;

    std::vector<std::string> words;
    if (cfg.verbalize_numbers && text::is_digits(tok)) {
      auto first = tok.find_first_not_of('0');
      if (first != std::string::npos && tok.size() - first > 15) {
        // Beyond cardinal range: read digit by digit.
        for (char c : tok) words.emplace_back(detail::kUnits[static_cast<std::size_t>(c - '0')]);
      } else {
        words = number_to_words(tok);
      }
    } else {
      words.push_back(std::move(tok));
    }
    for (auto& w : words) {
      if (!cfg.filler_lexicon.contains(w)) out.push_back(std::move(w));
    }
  }
  return out;
}

}  // namespace verbatim
