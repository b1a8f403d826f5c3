#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "verbatim/corpus.hpp"
#include "verbatim/errors.hpp"
#include "verbatim/lexicon.hpp"

namespace verbatim {

enum class Scheme { pure, rich, extra };

inline constexpr std::array kAllSchemes = {Scheme::pure, Scheme::rich, Scheme::extra};

inline std::string_view to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::pure: return "pure";
    case Scheme::rich: return "rich";
    case Scheme::extra: return "extra";
  }
  return "?";
}

inline std::optional<Scheme> parse_scheme(std::string_view name) noexcept {
  for (auto s : kAllSchemes) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

struct PlainTranscript {
  std::string utterance_id;
  Scheme scheme = Scheme::pure;
  std::string text;
  friend bool operator==(const PlainTranscript&, const PlainTranscript&) = default;
};

/// Rendered text of the marker that closes a speech unit in Rich/Extra.
inline std::string_view unit_mark(SpeechUnitType t) noexcept {
  switch (t) {
    case SpeechUnitType::statement: return ".";
    case SpeechUnitType::question: return "?";
    case SpeechUnitType::incomplete: return "...";
  }
  return "";
}

inline constexpr std::string_view kHesitationMark = "#";

/// Hesitations dropped, partial words kept bare, no unit punctuation. Words
/// that are themselves lexicon fillers are dropped too.
inline PlainTranscript compile_pure(const AnnotatedTranscript& t,
                                    const FillerLexicon& lexicon = FillerLexicon()) {
  std::vector<std::string> words;
  for (const auto& unit : t.units()) {
    for (const auto& tok : unit.tokens()) {
      if (tok.is_hesitation() || lexicon.contains_folded(tok.text())) continue;
      words.push_back(tok.text());
    }
  }
  return {t.utterance_id(), Scheme::pure, text::join(words)};
}

namespace detail {

// Renders the rich token stream; when `fillers` is set each hesitation takes
// the next filler instead of "#".
inline std::string render_marked(const AnnotatedTranscript& t,
                                 const std::vector<std::string>* fillers) {
  std::vector<std::string> out;
  std::size_t next_filler = 0;
  for (const auto& unit : t.units()) {
    for (const auto& tok : unit.tokens()) {
      if (tok.is_hesitation()) {
        out.push_back(fillers ? (*fillers)[next_filler++] : std::string(kHesitationMark));
      } else if (tok.is_partial()) {
        out.push_back(tok.text() + "-");
      } else {
        out.push_back(tok.text());
      }
    }
    out.back() += unit_mark(unit.type());
  }
  return text::join(out);
}

}  // namespace detail

/// Table mapping: hesitation -> "#", partial -> "word-", unit end -> "." / "?"
/// / "..." attached to the unit's last token, other marks dropped.
inline PlainTranscript compile_rich(const AnnotatedTranscript& t) {
  return {t.utterance_id(), Scheme::rich, detail::render_marked(t, nullptr)};
}

/// Rich output with the i-th "#" replaced by fillers[i].
inline PlainTranscript compile_extra(const AnnotatedTranscript& t,
                                     const std::vector<std::string>& fillers,
                                     const FillerLexicon& lexicon = FillerLexicon()) {
  const auto expected = t.hesitation_count();
  if (fillers.size() != expected) {
    throw ArityError(t.utterance_id() + ": " + std::to_string(fillers.size()) +
                     " fillers supplied for " + std::to_string(expected) + " hesitations");
  }
  for (const auto& f : fillers) {
    if (!lexicon.contains(f)) {
      throw LexiconError(t.utterance_id() + ": filler '" + f + "' is not in the lexicon");
    }
  }
  return {t.utterance_id(), Scheme::extra, detail::render_marked(t, &fillers)};
}

}  // namespace verbatim
