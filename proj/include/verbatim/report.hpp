#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "verbatim/errors.hpp"
#include "verbatim/scheme.hpp"
#include "verbatim/wer.hpp"

namespace verbatim::report {

// Round half away from zero at one decimal.
inline double round1(double x) { return std::round(x * 10.0) / 10.0; }

inline std::string fixed1(double x) {
  double r = round1(x);
  if (r == 0.0) r = 0.0;  // no "-0.0"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", r);
  return buf;
}

inline std::string signed1(double x) {
  const double r = round1(x);
  return (r < 0 ? "" : "+") + fixed1(r);
}

/// Relative change of `wer` against `base`, in percent of `base`.
inline double relative_delta(double wer, double base) {
  if (!(base > 0)) throw DomainError("relative delta needs a positive baseline WER");
  return (wer - base) / base * 100.0;
}

inline std::string render_delta(double wer, double base) {
  return signed1(relative_delta(wer, base));
}

inline std::string display_name(Scheme s) {
  switch (s) {
    case Scheme::pure: return "Pure";
    case Scheme::rich: return "Rich";
    case Scheme::extra: return "Extra";
  }
  return "?";
}

struct SchemeResult {
  Scheme scheme;
  WerReport report;
};

struct ComparisonRow {
  Scheme scheme;
  double wer_pct;
  std::optional<double> delta_pct;  // empty on the baseline row
  double sub_pct;
  double del_pct;
  double ins_pct;
};

struct ComparisonTable {
  Scheme baseline = Scheme::pure;
  std::vector<ComparisonRow> rows;  // pure, rich, extra order
};

inline ComparisonTable build_comparison(const std::vector<SchemeResult>& results,
                                        Scheme baseline = Scheme::pure) {
  auto find = [&](Scheme s) {
    return std::find_if(results.begin(), results.end(),
                        [s](const SchemeResult& r) { return r.scheme == s; });
  };
  for (auto s : kAllSchemes) {
    if (std::count_if(results.begin(), results.end(),
                      [s](const SchemeResult& r) { return r.scheme == s; }) > 1) {
      throw ValidationError("scheme '" + std::string(to_string(s)) + "' appears more than once");
    }
  }
  auto base = find(baseline);
  if (base == results.end()) {
    throw MissingBaselineError("baseline scheme '" + std::string(to_string(baseline)) +
                               "' has no result");
  }
  ComparisonTable t{baseline, {}};
  const double base_wer = base->report.wer_pct();
  for (auto s : kAllSchemes) {
    auto it = find(s);
    if (it == results.end()) continue;
    const auto& r = it->report;
    std::optional<double> delta;
    if (s != baseline) delta = relative_delta(r.wer_pct(), base_wer);
    t.rows.push_back({s, r.wer_pct(), delta, r.sub_pct(), r.del_pct(), r.ins_pct()});
  }
  return t;
}

namespace detail {

inline std::size_t display_width(const std::string& s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

// Left-aligned first column, right-aligned numbers, two-space gutters.
inline std::string render_grid(const std::vector<std::vector<std::string>>& cells) {
  std::vector<std::size_t> widths;
  for (const auto& row : cells) {
    widths.resize(std::max(widths.size(), row.size()));
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], display_width(row[c]));
  }
  std::string out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    std::string line;
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      const auto& cell = cells[r][c];
      const std::string pad(widths[c] - display_width(cell), ' ');
      if (c) line += "  ";
      line += c == 0 ? cell + pad : pad + cell;
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
    if (r == 0) {
      std::size_t total = 0;
      for (auto w : widths) total += w;
      out += std::string(total + 2 * (widths.size() - 1), '-') + "\n";
    }
  }
  return out;
}

inline std::string render_tsv(const std::vector<std::vector<std::string>>& cells) {
  std::string out;
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += '\t';
      out += row[c];
    }
    out += '\n';
  }
  return out;
}

inline std::vector<std::vector<std::string>> comparison_cells(const ComparisonTable& t, bool tsv) {
  std::vector<std::vector<std::string>> cells;
  if (tsv) {
    cells.push_back({"scheme", "wer_pct", "delta_vs_" + std::string(to_string(t.baseline)) + "_pct",
                     "sub_pct", "del_pct", "ins_pct"});
  } else {
    cells.push_back({"Transcription Scheme", "WER (%)",
                     "\xCE\x94 vs. " + display_name(t.baseline) + " (%)", "Substitutions (%)",
                     "Deletions (%)", "Insertions (%)"});
  }
  for (const auto& r : t.rows) {
    cells.push_back({tsv ? std::string(to_string(r.scheme)) : display_name(r.scheme),
                     fixed1(r.wer_pct), r.delta_pct ? signed1(*r.delta_pct) : "-", fixed1(r.sub_pct),
                     fixed1(r.del_pct), fixed1(r.ins_pct)});
  }
  return cells;
}

}  // namespace detail

/// Scheme comparison with a relative-delta column against the baseline.
inline std::string render_comparison(const ComparisonTable& t) {
  return detail::render_grid(detail::comparison_cells(t, false));
}

inline std::string render_comparison_tsv(const ComparisonTable& t) {
  return detail::render_tsv(detail::comparison_cells(t, true));
}

inline std::string render_comparison(const std::vector<SchemeResult>& results,
                                     Scheme baseline = Scheme::pure) {
  return render_comparison(build_comparison(results, baseline));
}

/// One evaluated system in the model-comparison layout.
struct SystemResult {
  std::string label;
  std::string parameters;
  WerReport report;
};

namespace detail {

inline std::vector<std::vector<std::string>> system_cells(const std::vector<SystemResult>& rows,
                                                          bool tsv) {
  std::vector<std::vector<std::string>> cells;
  if (tsv) {
    cells.push_back({"model", "parameters", "wer_pct", "sub_pct", "del_pct", "ins_pct"});
  } else {
    cells.push_back({"Model Variant", "Parameters", "WER (%)", "Substitutions (%)", "Deletions (%)",
                     "Insertions (%)"});
  }
  for (const auto& r : rows) {
    cells.push_back({r.label, r.parameters.empty() ? "-" : r.parameters, fixed1(r.report.wer_pct()),
                     fixed1(r.report.sub_pct()), fixed1(r.report.del_pct()),
                     fixed1(r.report.ins_pct())});
  }
  return cells;
}

}  // namespace detail

inline std::string render_systems(const std::vector<SystemResult>& rows) {
  return detail::render_grid(detail::system_cells(rows, false));
}

inline std::string render_systems_tsv(const std::vector<SystemResult>& rows) {
  return detail::render_tsv(detail::system_cells(rows, true));
}

// Score documents exchanged between `score --json` and `report`.
inline nlohmann::ordered_json score_to_json(const WerReport& r, const std::string& label,
                                            const std::string& parameters = "") {
  nlohmann::ordered_json j;
  j["label"] = label;
  if (!parameters.empty()) j["parameters"] = parameters;
  j["n_ref"] = r.counts.n_ref;
  j["matches"] = r.counts.matches;
  j["substitutions"] = r.counts.substitutions;
  j["deletions"] = r.counts.deletions;
  j["insertions"] = r.counts.insertions;
  j["wer_pct"] = r.wer_pct();
  j["sub_pct"] = r.sub_pct();
  j["del_pct"] = r.del_pct();
  j["ins_pct"] = r.ins_pct();
  return j;
}

inline SystemResult score_from_json(const nlohmann::json& j) {
  try {
    SystemResult s;
    s.label = j.at("label").get<std::string>();
    s.parameters = j.value("parameters", std::string{});
    auto& c = s.report.counts;
    c.n_ref = j.at("n_ref").get<std::size_t>();
    c.matches = j.at("matches").get<std::size_t>();
    c.substitutions = j.at("substitutions").get<std::size_t>();
    c.deletions = j.at("deletions").get<std::size_t>();
    c.insertions = j.at("insertions").get<std::size_t>();
    if (c.matches + c.substitutions + c.deletions != c.n_ref) {
      throw ValidationError("score '" + s.label + "': matches + S + D != n_ref");
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed score document: ") + e.what());
  }
}

}  // namespace verbatim::report
