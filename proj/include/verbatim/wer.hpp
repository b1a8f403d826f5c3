#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "verbatim/errors.hpp"
#include "verbatim/normalize.hpp"

namespace verbatim {

enum class EditKind { match, substitute, del, insert };

struct EditOp {
  EditKind kind;
  std::optional<std::string> ref_token;
  std::optional<std::string> hyp_token;
  friend bool operator==(const EditOp&, const EditOp&) = default;
};

struct EditCounts {
  std::size_t n_ref = 0;
  std::size_t matches = 0;
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;

  std::size_t errors() const noexcept { return substitutions + deletions + insertions; }
  std::size_t n_hyp() const noexcept { return matches + substitutions + insertions; }

  EditCounts& operator+=(const EditCounts& o) noexcept {
    n_ref += o.n_ref;
    matches += o.matches;
    substitutions += o.substitutions;
    deletions += o.deletions;
    insertions += o.insertions;
    return *this;
  }
  friend bool operator==(const EditCounts&, const EditCounts&) = default;
};

struct Alignment {
  std::vector<EditOp> ops;
  EditCounts counts;

  std::size_t cost() const noexcept { return counts.errors(); }
};

/// Minimum edit distance alignment with unit costs. Among the optimal
/// scripts the one with the fewest deletions plus insertions wins, so the
/// counts do not depend on which side is the reference (S stays, D and I
/// swap). Remaining ties are broken in the backtrace, run from the end of both
/// sequences: match, then substitution, then deletion, then insertion.
inline Alignment align(const TokenSequence& ref, const TokenSequence& hyp) {
  // (cost, gaps) compared lexicographically.
  struct Cell {
    std::size_t cost = 0, gaps = 0;
    bool operator==(const Cell&) const = default;
    auto operator<=>(const Cell&) const = default;
  };
  const std::size_t n = ref.size(), m = hyp.size();
  const std::size_t width = m + 1;
  std::vector<Cell> d((n + 1) * width);
  auto gap = [](Cell c) { return Cell{c.cost + 1, c.gaps + 1}; };
  auto diag = [&](Cell c, std::size_t i, std::size_t j) {
    return Cell{c.cost + (ref[i - 1] == hyp[j - 1] ? 0 : 1), c.gaps};
  };
  for (std::size_t j = 0; j <= m; ++j) d[j] = {j, j};
  for (std::size_t i = 1; i <= n; ++i) {
    Cell* row = &d[i * width];
    const Cell* prev = &d[(i - 1) * width];
    row[0] = {i, i};
    for (std::size_t j = 1; j <= m; ++j) {
      row[j] = std::min({diag(prev[j - 1], i, j), gap(prev[j]), gap(row[j - 1])});
    }
  }

  Alignment a;
  a.counts.n_ref = n;
  a.ops.reserve(std::max(n, m));
  std::size_t i = n, j = m;
  auto at = [&](std::size_t r, std::size_t c) { return d[r * width + c]; };
  while (i > 0 || j > 0) {
    const Cell here = at(i, j);
    const bool can_diag = i > 0 && j > 0 && here == diag(at(i - 1, j - 1), i, j);
    if (can_diag && ref[i - 1] == hyp[j - 1]) {
      a.ops.push_back({EditKind::match, ref[i - 1], hyp[j - 1]});
      ++a.counts.matches;
      --i, --j;
    } else if (can_diag) {
      a.ops.push_back({EditKind::substitute, ref[i - 1], hyp[j - 1]});
      ++a.counts.substitutions;
      --i, --j;
    } else if (i > 0 && here == gap(at(i - 1, j))) {
      a.ops.push_back({EditKind::del, ref[i - 1], std::nullopt});
      ++a.counts.deletions;
      --i;
    } else {
      a.ops.push_back({EditKind::insert, std::nullopt, hyp[j - 1]});
      ++a.counts.insertions;
      --j;
    }
  }
  std::reverse(a.ops.begin(), a.ops.end());
  return a;
}

/// Corpus or utterance level error statistics. Percentages are derived from
/// the exact counts on demand; rounding is a rendering concern.
struct WerReport {
  EditCounts counts;

  double pct(std::size_t count) const {
    return counts.n_ref ? 100.0 * static_cast<double>(count) / static_cast<double>(counts.n_ref)
                        : 0.0;
  }
  double wer_pct() const { return pct(counts.errors()); }
  double sub_pct() const { return pct(counts.substitutions); }
  double del_pct() const { return pct(counts.deletions); }
  double ins_pct() const { return pct(counts.insertions); }
};

struct UtteranceScore {
  std::string utterance_id;
  Alignment alignment;
};

struct CorpusScore {
  WerReport total;
  std::vector<UtteranceScore> utterances;  // ordered by utterance_id
};

/// Sums per-utterance alignments. Every hypothesis id must exist in the
/// references; references without a hypothesis score as all deletions.
inline CorpusScore score_corpus(const std::map<std::string, TokenSequence>& refs,
                                const std::map<std::string, TokenSequence>& hyps) {
  for (const auto& [id, _] : hyps) {
    if (!refs.contains(id)) {
      throw UnknownUtteranceError("hypothesis utterance '" + id + "' has no reference");
    }
  }
  static const TokenSequence kEmpty;
  CorpusScore out;
  out.utterances.reserve(refs.size());
  for (const auto& [id, ref] : refs) {
    auto it = hyps.find(id);
    auto a = align(ref, it == hyps.end() ? kEmpty : it->second);
    out.total.counts += a.counts;
    out.utterances.push_back({id, std::move(a)});
  }
  if (out.total.counts.n_ref == 0) throw EmptyCorpusError("reference corpus has no words");
  return out;
}

}  // namespace verbatim
