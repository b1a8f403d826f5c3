#pragma once

// Independent reference implementations used only by tests. None of these
// call into the code paths they check.

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace verbatim::oracle {

// Minimum edit cost found by walking every edit script (match/substitute,
// delete, insert) from the start of both sequences. Branches whose running
// cost already reaches the best complete script are cut; every other script
// is visited.
class ExhaustiveEditDistance {
public:
  ExhaustiveEditDistance(const std::vector<std::string>& ref, const std::vector<std::string>& hyp)
      : ref_(ref), hyp_(hyp), best_(ref.size() + hyp.size()), best_gaps_(best_) {
    walk(0, 0, 0, 0);
  }

  std::size_t cost() const { return best_; }
  // Fewest deletions plus insertions over the minimum-cost scripts.
  std::size_t min_gaps() const { return best_gaps_; }
  std::size_t scripts_visited() const { return visited_; }

private:
  void walk(std::size_t i, std::size_t j, std::size_t cost, std::size_t gaps) {
    if (cost > best_) return;
    if (i == ref_.size() && j == hyp_.size()) {
      ++visited_;
      if (cost < best_) {
        best_ = cost;
        best_gaps_ = gaps;
      } else {
        best_gaps_ = std::min(best_gaps_, gaps);
      }
      return;
    }
    if (i < ref_.size() && j < hyp_.size()) walk(i + 1, j + 1, cost + (ref_[i] == hyp_[j] ? 0 : 1), gaps);
    if (i < ref_.size()) walk(i + 1, j, cost + 1, gaps + 1);
    if (j < hyp_.size()) walk(i, j + 1, cost + 1, gaps + 1);
  }

  const std::vector<std::string>& ref_;
  const std::vector<std::string>& hyp_;
  std::size_t best_;
  std::size_t best_gaps_;
  std::size_t visited_ = 0;
};

inline std::size_t edit_distance(const std::vector<std::string>& ref,
                                 const std::vector<std::string>& hyp) {
  return ExhaustiveEditDistance(ref, hyp).cost();
}

// Verbalizations of 0..9999 built by enumerating thousands, hundreds and the
// final two digits from hand-written word lists.
inline std::map<int, std::vector<std::string>> number_words_table() {
  static const char* const kBelowTwenty[] = {
      "zero",    "one",     "two",     "three",     "four",     "five",    "six",
      "seven",   "eight",   "nine",    "ten",       "eleven",   "twelve",  "thirteen",
      "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen", "twenty"};
  static const char* const kTens[] = {"twenty", "thirty", "forty",  "fifty",
                                      "sixty",  "seventy", "eighty", "ninety"};

  std::array<std::string, 100> last_two;
  for (int n = 1; n <= 20; ++n) last_two[n] = kBelowTwenty[n];
  for (int t = 0; t < 8; ++t) {
    for (int u = 0; u < 10; ++u) {
      const int n = 20 + 10 * t + u;
      last_two[n] = std::string(kTens[t]) + (u ? std::string(" ") + kBelowTwenty[u] : "");
    }
  }

  std::map<int, std::vector<std::string>> table;
  for (int th = 0; th < 10; ++th) {
    for (int h = 0; h < 10; ++h) {
      for (int r = 0; r < 100; ++r) {
        std::string phrase;
        if (th) phrase += std::string(kBelowTwenty[th]) + " thousand ";
        if (h) phrase += std::string(kBelowTwenty[h]) + " hundred ";
        phrase += last_two[r];
        const int n = th * 1000 + h * 100 + r;
        if (n == 0) phrase = "zero";
        std::istringstream ss(phrase);
        std::vector<std::string> words;
        for (std::string w; ss >> w;) words.push_back(w);
        table[n] = words;
      }
    }
  }
  return table;
}

// Artifact filter decision as an explicit truth table indexed by
// [disjunction][short duration][low confidence].
inline bool filter_discards(bool disjunction, bool short_dur, bool low_conf) {
  static constexpr bool kTable[2][2][2] = {
      {{false, false}, {false, true}},  // conjunction
      {{false, true}, {true, true}},    // disjunction
  };
  return kTable[disjunction][short_dur][low_conf];
}

}  // namespace verbatim::oracle
