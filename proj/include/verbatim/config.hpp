#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "verbatim/completion.hpp"
#include "verbatim/ctm.hpp"
#include "verbatim/errors.hpp"
#include "verbatim/io.hpp"
#include "verbatim/lexicon.hpp"
#include "verbatim/normalize.hpp"
#include "verbatim/text.hpp"

namespace verbatim {

// Settings shared by the CLI subcommands. Precedence is flags > config file >
// these defaults.
struct PipelineConfig {
  std::string provider_base_url;
  std::string provider_model;
  int provider_max_in_flight = 4;
  double provider_timeout_s = 60.0;
  CompletionPolicy completion;
  FillerLexicon lexicon;
  NormalizationConfig normalization;
  FilterPolicy filter;
};

using ConfigValues = std::map<std::string, std::string, std::less<>>;

/// Parses "key = value" lines. Lines starting with '#' or ';' are comments.
inline ConfigValues parse_config(std::string_view doc) {
  ConfigValues values;
  std::size_t n = 0;
  for (auto line : io::lines(doc)) {
    ++n;
    line = text::trim(line);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("config line " + std::to_string(n) + ": expected 'key = value'");
    }
    auto key = std::string(text::trim(line.substr(0, eq)));
    if (key.empty()) throw ValidationError("config line " + std::to_string(n) + ": empty key");
    values[key] = std::string(text::trim(line.substr(eq + 1)));
  }
  return values;
}

namespace detail {

inline bool parse_bool(const std::string& key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ValidationError("config '" + key + "': expected a boolean, got '" + std::string(v) + "'");
}

inline int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    int x = std::stoi(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw ValidationError("config '" + key + "': expected an integer, got '" + v + "'");
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw ValidationError("config '" + key + "': expected a number, got '" + v + "'");
}

inline Decimal parse_decimal(const std::string& key, const std::string& v) {
  auto d = Decimal::parse(v);
  if (!d) throw ValidationError("config '" + key + "': expected a non-negative decimal, got '" + v + "'");
  return *d;
}

}  // namespace detail

// "20" ms -> 0.020 s, exactly.
inline Decimal millis_to_seconds(const Decimal& ms) { return Decimal(ms.units(), ms.scale() + 3); }

inline FilterCombine parse_combine(std::string_view v) {
  if (v == "and" || v == "conjunction") return FilterCombine::conjunction;
  if (v == "or" || v == "disjunction") return FilterCombine::disjunction;
  throw ValidationError("combine mode must be 'and' or 'or', got '" + std::string(v) + "'");
}

inline FillerLexicon parse_lexicon(std::string_view entries, std::string default_filler) {
  std::set<std::string> set;
  std::string cur;
  for (char c : std::string(entries) + ",") {
    if (c == ',') {
      auto t = std::string(text::trim(cur));
      if (!t.empty()) set.insert(t);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (default_filler.empty() && !set.empty()) default_filler = *set.begin();
  return FillerLexicon(std::move(set), std::move(default_filler));
}

/// Overlays key-value settings onto `cfg`. Unknown keys are rejected.
inline void apply_config(PipelineConfig& cfg, const ConfigValues& values) {
  std::optional<std::string> lex_entries, lex_default;
  for (const auto& [key, v] : values) {
    if (key == "provider.base_url") cfg.provider_base_url = v;
    else if (key == "provider.model") cfg.provider_model = v;
    else if (key == "provider.max_in_flight") cfg.provider_max_in_flight = detail::parse_int(key, v);
    else if (key == "provider.timeout_s") cfg.provider_timeout_s = detail::parse_double(key, v);
    else if (key == "completion.retry_budget") cfg.completion.retry_budget = detail::parse_int(key, v);
    else if (key == "completion.fallback") cfg.completion.fallback = detail::parse_bool(key, v);
    else if (key == "lexicon.entries") lex_entries = v;
    else if (key == "lexicon.default") lex_default = v;
    else if (key == "normalize.verbalize_numbers") cfg.normalization.verbalize_numbers = detail::parse_bool(key, v);
    else if (key == "normalize.strip_partial_hyphen") cfg.normalization.strip_partial_hyphen = detail::parse_bool(key, v);
    else if (key == "normalize.lowercase") cfg.normalization.lowercase = detail::parse_bool(key, v);
    else if (key == "filter.min_dur_ms") cfg.filter.min_dur_s = millis_to_seconds(detail::parse_decimal(key, v));
    else if (key == "filter.min_conf") cfg.filter.min_conf = detail::parse_decimal(key, v);
    else if (key == "filter.combine") cfg.filter.combine = parse_combine(v);
    else throw ValidationError("unknown config key '" + key + "'");
  }
  if (lex_entries || lex_default) {
    std::string entries;
    if (lex_entries) {
      entries = *lex_entries;
    } else {
      for (const auto& e : cfg.lexicon.entries()) entries += e + ",";
    }
    std::string def = lex_default.value_or("");
    if (def.empty() && parse_lexicon(entries, "").contains(cfg.lexicon.default_filler())) {
      def = cfg.lexicon.default_filler();
    }
    cfg.lexicon = parse_lexicon(entries, def);
  }
  if (cfg.provider_max_in_flight < 1) throw ValidationError("provider.max_in_flight must be >= 1");
  if (cfg.completion.retry_budget < 0) throw ValidationError("completion.retry_budget must be >= 0");
  if (!(cfg.provider_timeout_s > 0)) throw ValidationError("provider.timeout_s must be positive");
  cfg.filter.validate();
  cfg.normalization.filler_lexicon = cfg.lexicon;
}

inline PipelineConfig load_config(const std::optional<std::string>& path) {
  PipelineConfig cfg;
  if (path) apply_config(cfg, parse_config(io::read_file(*path)));
  cfg.normalization.filler_lexicon = cfg.lexicon;
  return cfg;
}

}  // namespace verbatim
