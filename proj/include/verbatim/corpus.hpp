#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "verbatim/errors.hpp"
#include "verbatim/io.hpp"
#include "verbatim/text.hpp"

// Annotated-transcript data model and the JSON ingestion format.
//
// One file per utterance:
//   {"utterance_id": "u1", "audio_ref": "a/u1.wav" | null,
//    "units": [{"type": "statement" | "question" | "incomplete",
//               "tokens": [{"text": "think", "tags": ["disfluency"]}, ...]}]}
//
// Manifests are JSON lines: {"utterance_id": ..., "path": ..., "audio_ref": ...}.

namespace verbatim {

enum class WordTag { hesitation, partial, backchannel, disfluency };

inline constexpr std::array kAllWordTags = {WordTag::hesitation, WordTag::partial,
                                            WordTag::backchannel, WordTag::disfluency};

inline std::string_view to_string(WordTag tag) noexcept {
  switch (tag) {
    case WordTag::hesitation: return "hesitation";
    case WordTag::partial: return "partial";
    case WordTag::backchannel: return "backchannel";
    case WordTag::disfluency: return "disfluency";
  }
  return "?";
}

inline std::optional<WordTag> parse_word_tag(std::string_view name) noexcept {
  for (auto tag : kAllWordTags) {
    if (to_string(tag) == name) return tag;
  }
  return std::nullopt;
}

using TagSet = std::set<WordTag>;

/// A single annotated word. Hesitations carry no text; every other token
/// carries one whitespace-free word free of transcript markup.
class AnnotatedToken {
public:
  AnnotatedToken(std::string text, TagSet tags) : text_(std::move(text)), tags_(std::move(tags)) {
    validate();
  }

  static AnnotatedToken hesitation() { return AnnotatedToken("", {WordTag::hesitation}); }
  static AnnotatedToken word(std::string text, TagSet tags = {}) {
    return AnnotatedToken(std::move(text), std::move(tags));
  }
  static AnnotatedToken partial(std::string text) {
    return AnnotatedToken(std::move(text), {WordTag::partial});
  }

  const std::string& text() const noexcept { return text_; }
  const TagSet& tags() const noexcept { return tags_; }
  bool has(WordTag tag) const { return tags_.contains(tag); }
  bool is_hesitation() const { return has(WordTag::hesitation); }
  bool is_partial() const { return has(WordTag::partial); }

  friend bool operator==(const AnnotatedToken&, const AnnotatedToken&) = default;

private:
  void validate() const {
    const bool hes = has(WordTag::hesitation);
    if (hes && has(WordTag::partial)) {
      throw SchemaError("token cannot be both hesitation and partial");
    }
    if (hes) {
      if (!text_.empty()) throw SchemaError("hesitation token must have empty text");
      if (tags_.size() != 1) {
        throw SchemaError("hesitation token cannot carry other tags");
      }
      return;
    }
    if (has(WordTag::partial) &&
        (has(WordTag::backchannel) || has(WordTag::disfluency))) {
      throw SchemaError("partial token cannot carry backchannel/disfluency tags");
    }
    if (text_.empty()) throw SchemaError("non-hesitation token must have text");
    if (text::has_space(text_)) throw SchemaError("token text '" + text_ + "' contains whitespace");
    if (text_.find('#') != std::string::npos || text::has_sentence_punct(text_)) {
      throw SchemaError("token text '" + text_ + "' contains reserved markup characters");
    }
    if (text_.back() == '-') {
      throw SchemaError("token text '" + text_ + "' ends with '-'; use the partial tag");
    }
  }

  std::string text_;
  TagSet tags_;
};

enum class SpeechUnitType { statement, question, incomplete };

inline std::string_view to_string(SpeechUnitType t) noexcept {
  switch (t) {
    case SpeechUnitType::statement: return "statement";
    case SpeechUnitType::question: return "question";
    case SpeechUnitType::incomplete: return "incomplete";
  }
  return "?";
}

inline std::optional<SpeechUnitType> parse_unit_type(std::string_view name) noexcept {
  for (auto t : {SpeechUnitType::statement, SpeechUnitType::question, SpeechUnitType::incomplete}) {
    if (to_string(t) == name) return t;
  }
  return std::nullopt;
}

class SpeechUnit {
public:
  SpeechUnit(std::vector<AnnotatedToken> tokens, SpeechUnitType type)
      : tokens_(std::move(tokens)), type_(type) {
    if (tokens_.empty()) throw SchemaError("speech unit has no tokens");
  }

  const std::vector<AnnotatedToken>& tokens() const noexcept { return tokens_; }
  SpeechUnitType type() const noexcept { return type_; }

  friend bool operator==(const SpeechUnit&, const SpeechUnit&) = default;

private:
  std::vector<AnnotatedToken> tokens_;
  SpeechUnitType type_;
};

class AnnotatedTranscript {
public:
  AnnotatedTranscript(std::string utterance_id, std::optional<std::string> audio_ref,
                      std::vector<SpeechUnit> units)
      : id_(std::move(utterance_id)), audio_ref_(std::move(audio_ref)), units_(std::move(units)) {
    if (id_.empty()) throw SchemaError("utterance_id is empty");
  }

  const std::string& utterance_id() const noexcept { return id_; }
  const std::optional<std::string>& audio_ref() const noexcept { return audio_ref_; }
  const std::vector<SpeechUnit>& units() const noexcept { return units_; }

  std::size_t token_count() const {
    std::size_t n = 0;
    for (const auto& u : units_) n += u.tokens().size();
    return n;
  }

  std::size_t hesitation_count() const {
    std::size_t n = 0;
    for (const auto& u : units_) {
      n += static_cast<std::size_t>(std::count_if(u.tokens().begin(), u.tokens().end(),
                                                  [](const auto& t) { return t.is_hesitation(); }));
    }
    return n;
  }

  AnnotatedTranscript with_audio_ref(std::optional<std::string> ref) const {
    return AnnotatedTranscript(id_, std::move(ref), units_);
  }

  friend bool operator==(const AnnotatedTranscript&, const AnnotatedTranscript&) = default;

private:
  std::string id_;
  std::optional<std::string> audio_ref_;
  std::vector<SpeechUnit> units_;
};

namespace detail {

using nlohmann::json;

[[noreturn]] inline void schema_fail(const std::string& locus, const std::string& what) {
  throw SchemaError(locus.empty() ? what : locus + ": " + what);
}

inline void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                                const std::string& locus) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      schema_fail(locus, "unknown field '" + key + "'");
    }
  }
}

inline const json& require(const json& obj, const char* key, const std::string& locus) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_fail(locus, std::string("missing field '") + key + "'");
  return *it;
}

inline std::string require_string(const json& obj, const char* key, const std::string& locus) {
  const auto& v = require(obj, key, locus);
  if (!v.is_string()) schema_fail(locus + "." + key, "expected string");
  return v.get<std::string>();
}

inline std::optional<std::string> optional_string(const json& obj, const char* key,
                                                  const std::string& locus) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) schema_fail(locus + "." + key, "expected string or null");
  return it->get<std::string>();
}

inline json parse_json(std::string_view doc, const std::string& what) {
  try {
    return json::parse(doc);
  } catch (const json::parse_error& e) {
    throw SchemaError(what + ": malformed JSON: " + e.what());
  }
}

}  // namespace detail

/// Parses one annotated transcript document. SchemaError messages carry the
/// JSON locus of the offending field, e.g. "units[1].tokens[0].tags[0]".
inline AnnotatedTranscript parse_annotated_transcript(std::string_view doc) {
  using detail::schema_fail;
  const auto root = detail::parse_json(doc, "transcript");
  if (!root.is_object()) schema_fail("", "top level must be an object");
  detail::reject_unknown_keys(root, {"utterance_id", "audio_ref", "units"}, "");

  auto id = detail::require_string(root, "utterance_id", "");
  if (id.empty()) schema_fail("utterance_id", "must be non-empty");
  auto audio = detail::optional_string(root, "audio_ref", "");

  const auto& units_json = detail::require(root, "units", "");
  if (!units_json.is_array()) schema_fail("units", "expected array");

  std::vector<SpeechUnit> units;
  units.reserve(units_json.size());
  for (std::size_t ui = 0; ui < units_json.size(); ++ui) {
    const std::string ulocus = "units[" + std::to_string(ui) + "]";
    const auto& u = units_json[ui];
    if (!u.is_object()) schema_fail(ulocus, "expected object");
    detail::reject_unknown_keys(u, {"type", "tokens"}, ulocus);
    auto type_name = detail::require_string(u, "type", ulocus);
    auto type = parse_unit_type(type_name);
    if (!type) schema_fail(ulocus + ".type", "unknown speech unit type '" + type_name + "'");

    const auto& toks = detail::require(u, "tokens", ulocus);
    if (!toks.is_array()) schema_fail(ulocus + ".tokens", "expected array");
    if (toks.empty()) schema_fail(ulocus + ".tokens", "speech unit has no tokens");

    std::vector<AnnotatedToken> tokens;
    tokens.reserve(toks.size());
    for (std::size_t ti = 0; ti < toks.size(); ++ti) {
      const std::string tlocus = ulocus + ".tokens[" + std::to_string(ti) + "]";
      const auto& t = toks[ti];
      if (!t.is_object()) schema_fail(tlocus, "expected object");
      detail::reject_unknown_keys(t, {"text", "tags"}, tlocus);
      auto text = detail::require_string(t, "text", tlocus);
      TagSet tags;
      if (auto it = t.find("tags"); it != t.end()) {
        if (!it->is_array()) schema_fail(tlocus + ".tags", "expected array");
        for (std::size_t gi = 0; gi < it->size(); ++gi) {
          const std::string glocus = tlocus + ".tags[" + std::to_string(gi) + "]";
          const auto& g = (*it)[gi];
          if (!g.is_string()) schema_fail(glocus, "expected string");
          auto tag = parse_word_tag(g.get<std::string>());
          if (!tag) schema_fail(glocus, "unknown tag '" + g.get<std::string>() + "'");
          if (!tags.insert(*tag).second) schema_fail(glocus, "duplicate tag");
        }
      }
      try {
        tokens.emplace_back(std::move(text), std::move(tags));
      } catch (const SchemaError& e) {
        schema_fail(tlocus, e.what());
      }
    }
    units.emplace_back(std::move(tokens), *type);
  }
  return AnnotatedTranscript(std::move(id), std::move(audio), std::move(units));
}

inline nlohmann::json to_json(const AnnotatedTranscript& t) {
  using nlohmann::json;
  json units = json::array();
  for (const auto& u : t.units()) {
    json toks = json::array();
    for (const auto& tok : u.tokens()) {
      json tags = json::array();
      for (auto tag : tok.tags()) tags.push_back(std::string(to_string(tag)));
      toks.push_back({{"text", tok.text()}, {"tags", std::move(tags)}});
    }
    units.push_back({{"type", std::string(to_string(u.type()))}, {"tokens", std::move(toks)}});
  }
  json root;
  root["utterance_id"] = t.utterance_id();
  root["audio_ref"] = t.audio_ref() ? json(*t.audio_ref()) : json(nullptr);
  root["units"] = std::move(units);
  return root;
}

inline std::string serialize_annotated_transcript(const AnnotatedTranscript& t) {
  return to_json(t).dump(2) + "\n";
}

enum class Split { train, dev, eval };

inline std::string_view to_string(Split s) noexcept {
  switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::eval: return "eval";
  }
  return "?";
}

inline std::optional<Split> parse_split(std::string_view name) noexcept {
  for (auto s : {Split::train, Split::dev, Split::eval}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

struct ManifestEntry {
  std::string utterance_id;
  std::filesystem::path path;  // resolved against the manifest's directory
  std::optional<std::string> audio_ref;
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct CorpusManifest {
  Split split = Split::train;
  std::vector<ManifestEntry> entries;

  std::size_t size() const noexcept { return entries.size(); }
};

/// Loads a JSON-lines manifest. Relative transcript paths resolve against the
/// manifest's own directory; every referenced file must exist now.
inline CorpusManifest load_manifest(const std::filesystem::path& path, Split split = Split::train) {
  namespace fs = std::filesystem;
  const auto doc = io::read_file(path);
  const auto base = path.parent_path();
  CorpusManifest manifest{split, {}};
  std::map<std::string, std::size_t> seen;

  auto ls = io::lines(doc);
  for (std::size_t n = 0; n < ls.size(); ++n) {
    auto line = text::trim(ls[n]);
    if (line.empty()) continue;
    const std::string locus = path.string() + ":" + std::to_string(n + 1);
    auto obj = detail::parse_json(line, locus);
    if (!obj.is_object()) throw SchemaError(locus + ": expected object");
    detail::reject_unknown_keys(obj, {"utterance_id", "path", "audio_ref"}, locus);
    auto id = detail::require_string(obj, "utterance_id", locus);
    if (id.empty()) throw SchemaError(locus + ": utterance_id is empty");
    fs::path p = detail::require_string(obj, "path", locus);
    auto audio = detail::optional_string(obj, "audio_ref", locus);

    if (auto [it, fresh] = seen.emplace(id, n + 1); !fresh) {
      throw DuplicateIdError(locus + ": duplicate utterance_id '" + id + "' (first on line " +
                             std::to_string(it->second) + ")");
    }
    if (p.is_relative()) p = base / p;
    if (!fs::exists(p)) {
      throw MissingFileError(locus + ": transcript '" + p.string() + "' does not exist");
    }
    manifest.entries.push_back({std::move(id), std::move(p), std::move(audio)});
  }
  return manifest;
}

inline AnnotatedTranscript read_annotated_transcript(const std::filesystem::path& path) {
  try {
    return parse_annotated_transcript(io::read_file(path));
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

/// Reads every transcript a manifest references, in manifest order. The
/// transcript's own utterance_id must match its manifest entry; a manifest
/// audio_ref fills in for a transcript that has none.
inline std::vector<AnnotatedTranscript> load_corpus(const CorpusManifest& manifest) {
  std::vector<AnnotatedTranscript> out;
  out.reserve(manifest.size());
  for (const auto& e : manifest.entries) {
    auto t = read_annotated_transcript(e.path);
    if (t.utterance_id() != e.utterance_id) {
      throw SchemaError(e.path.string() + ": utterance_id '" + t.utterance_id() +
                        "' does not match manifest id '" + e.utterance_id + "'");
    }
    if (!t.audio_ref() && e.audio_ref) t = t.with_audio_ref(e.audio_ref);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace verbatim
