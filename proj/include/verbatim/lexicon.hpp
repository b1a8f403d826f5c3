#pragma once

#include <initializer_list>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include "verbatim/errors.hpp"
#include "verbatim/text.hpp"

namespace verbatim {

/// Set of filled-pause tokens ("um", "uh", ...). The same lexicon drives the
/// hesitation completer, the Extra compiler and the normalizer's filler
/// removal, so all three agree on what a filler is.
class FillerLexicon {
public:
  FillerLexicon() : FillerLexicon({"um", "uh"}, "um") {}

  FillerLexicon(std::set<std::string> entries, std::string default_filler)
      : entries_(std::move(entries)), default_(std::move(default_filler)) {
    if (entries_.empty()) throw ValidationError("filler lexicon is empty");
    for (const auto& e : entries_) {
      if (e.empty() || text::has_space(e) || text::ascii_lower(e) != e) {
        throw ValidationError("filler lexicon entry '" + e +
                              "' must be a non-empty lowercase token");
      }
    }
    if (!entries_.contains(default_)) {
      throw ValidationError("default filler '" + default_ + "' is not in the lexicon");
    }
  }

  FillerLexicon(std::initializer_list<std::string> entries, std::string default_filler)
      : FillerLexicon(std::set<std::string>(entries), std::move(default_filler)) {}

  const std::set<std::string>& entries() const noexcept { return entries_; }
  const std::string& default_filler() const noexcept { return default_; }

  // Exact membership; callers canonicalize first.
  bool contains(std::string_view token) const {
    return entries_.find(std::string(token)) != entries_.end();
  }

  bool contains_folded(std::string_view token) const { return contains(text::ascii_lower(token)); }

  friend bool operator==(const FillerLexicon&, const FillerLexicon&) = default;

private:
  std::set<std::string> entries_;
  std::string default_;
};

}  // namespace verbatim
