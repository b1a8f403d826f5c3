#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "verbatim/errors.hpp"
#include "verbatim/io.hpp"
#include "verbatim/text.hpp"

namespace verbatim {

/// Non-negative fixed-point decimal that remembers how many fractional digits
/// it was written with, so "0.420" serializes back as "0.420".
class Decimal {
public:
  static constexpr int kMaxScale = 12;

  constexpr Decimal() = default;
  constexpr Decimal(std::int64_t units, int scale) : units_(units), scale_(scale) {}

  static std::optional<Decimal> parse(std::string_view s) {
    if (s.empty() || s.size() > 30) return std::nullopt;
    auto dot = s.find('.');
    auto whole = s.substr(0, dot);
    auto frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    if (whole.empty() || !text::is_digits(whole)) return std::nullopt;
    if (dot != std::string_view::npos && !text::is_digits(frac)) return std::nullopt;
    if (frac.size() > kMaxScale || whole.size() > 6) return std::nullopt;
    // "00.5" would not survive a round trip.
    if (whole.size() > 1 && whole.front() == '0') return std::nullopt;
    std::int64_t units = 0;
    for (char c : whole) units = units * 10 + (c - '0');
    for (char c : frac) units = units * 10 + (c - '0');
    return Decimal(units, static_cast<int>(frac.size()));
  }

  constexpr std::int64_t units() const noexcept { return units_; }
  constexpr int scale() const noexcept { return scale_; }

  double value() const noexcept {
    double d = static_cast<double>(units_);
    for (int i = 0; i < scale_; ++i) d /= 10.0;
    return d;
  }

  std::string str() const {
    std::string digits = std::to_string(units_);
    if (static_cast<int>(digits.size()) <= scale_) {
      digits.insert(0, static_cast<std::size_t>(scale_ + 1) - digits.size(), '0');
    }
    if (scale_ > 0) digits.insert(digits.size() - static_cast<std::size_t>(scale_), ".");
    return digits;
  }

  // Value comparison, exact across differing scales.
  friend int compare(const Decimal& a, const Decimal& b) noexcept {
    __int128 x = a.units_, y = b.units_;
    for (int i = a.scale_; i < b.scale_; ++i) x *= 10;
    for (int i = b.scale_; i < a.scale_; ++i) y *= 10;
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  friend bool operator<(const Decimal& a, const Decimal& b) noexcept { return compare(a, b) < 0; }

  // Structural: same value written the same way.
  friend bool operator==(const Decimal&, const Decimal&) = default;

private:
  std::int64_t units_ = 0;
  int scale_ = 0;
};

struct CtmToken {
  std::string utterance_id;
  std::string channel;
  Decimal start_s;
  Decimal dur_s;
  std::string word;
  std::optional<Decimal> confidence;

  friend bool operator==(const CtmToken&, const CtmToken&) = default;
};

/// Parses "utt channel start dur word [conf]" lines. Blank lines and ";;"
/// comments are skipped.
inline std::vector<CtmToken> parse_ctm(std::string_view doc) {
  std::vector<CtmToken> out;
  const auto ls = io::lines(doc);
  static const Decimal kOne(1, 0);
  for (std::size_t n = 0; n < ls.size(); ++n) {
    auto line = text::trim(ls[n]);
    if (line.empty() || line.starts_with(";;")) continue;
    const auto where = "line " + std::to_string(n + 1) + ": ";
    auto fields = text::split_ws(line);
    if (fields.size() != 5 && fields.size() != 6) {
      throw FormatError(where + "expected 5 or 6 fields, found " + std::to_string(fields.size()));
    }
    auto number = [&](const std::string& f, const char* name) {
      auto d = Decimal::parse(f);
      if (!d) throw FormatError(where + name + " '" + f + "' is not a non-negative decimal");
      return *d;
    };
    CtmToken tok{fields[0], fields[1], number(fields[2], "start"), number(fields[3], "duration"),
                 fields[4], std::nullopt};
    if (fields.size() == 6) {
      auto conf = number(fields[5], "confidence");
      if (kOne < conf) throw FormatError(where + "confidence " + fields[5] + " exceeds 1");
      tok.confidence = conf;
    }
    out.push_back(std::move(tok));
  }
  return out;
}

inline std::string serialize_ctm(const std::vector<CtmToken>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    out += t.utterance_id;
    out += ' ';
    out += t.channel;
    out += ' ';
    out += t.start_s.str();
    out += ' ';
    out += t.dur_s.str();
    out += ' ';
    out += t.word;
    if (t.confidence) {
      out += ' ';
      out += t.confidence->str();
    }
    out += '\n';
  }
  return out;
}

enum class FilterCombine { conjunction, disjunction };

struct FilterPolicy {
  Decimal min_dur_s{20, 3};  // 0.020 s
  Decimal min_conf{5, 1};    // 0.5
  FilterCombine combine = FilterCombine::conjunction;

  void validate() const {
    if (min_dur_s.units() < 0) throw ValidationError("min duration must be non-negative");
    if (min_conf.units() < 0 || Decimal(1, 0) < min_conf) {
      throw ValidationError("min confidence must lie in [0, 1]");
    }
  }
};

struct FilterResult {
  std::vector<CtmToken> kept;
  std::size_t discarded = 0;
};

/// True when the policy marks the token as a hallucination artifact. Both
/// thresholds are strict; a token without confidence counts as fully
/// confident.
inline bool is_artifact(const CtmToken& t, const FilterPolicy& policy) {
  const bool short_dur = t.dur_s < policy.min_dur_s;
  const bool low_conf = t.confidence && *t.confidence < policy.min_conf;
  return policy.combine == FilterCombine::conjunction ? (short_dur && low_conf)
                                                      : (short_dur || low_conf);
}

inline FilterResult filter_artifacts(const std::vector<CtmToken>& tokens,
                                     const FilterPolicy& policy = {}) {
  policy.validate();
  FilterResult r;
  r.kept.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (is_artifact(t, policy)) {
      ++r.discarded;
    } else {
      r.kept.push_back(t);
    }
  }
  return r;
}

/// Groups tokens per utterance, ordered by start time (file order breaks
/// ties). Ids in `reference_ids` that never occur map to empty lists.
inline std::map<std::string, std::vector<std::string>> ctm_to_transcripts(
    const std::vector<CtmToken>& tokens, const std::vector<std::string>& reference_ids = {}) {
  std::map<std::string, std::vector<const CtmToken*>> grouped;
  for (const auto& t : tokens) grouped[t.utterance_id].push_back(&t);

  std::map<std::string, std::vector<std::string>> out;
  for (auto& [id, toks] : grouped) {
    std::stable_sort(toks.begin(), toks.end(),
                     [](const CtmToken* a, const CtmToken* b) { return a->start_s < b->start_s; });
    auto& words = out[id];
    words.reserve(toks.size());
    for (const auto* t : toks) words.push_back(t->word);
  }
  for (const auto& id : reference_ids) out.try_emplace(id);
  return out;
}

}  // namespace verbatim
