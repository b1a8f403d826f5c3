#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "verbatim/errors.hpp"
#include "verbatim/io.hpp"
#include "verbatim/lexicon.hpp"
#include "verbatim/scheme.hpp"
#include "verbatim/text.hpp"

namespace verbatim {

inline constexpr std::string_view kCompletionSystemInstruction =
    "from the original transcription and speech audio, try to complete the hesitation tags #, "
    "without changing other things.";

inline constexpr std::string_view kTranscriptionPrefix = "transcription: ";

namespace detail {

// A rich token is a hesitation slot when it is "#" optionally followed by a
// unit mark ("#", "#.", "#?", "#..."). Returns the trailing mark.
inline std::optional<std::string_view> hesitation_slot(std::string_view tok) {
  if (!tok.starts_with(kHesitationMark)) return std::nullopt;
  auto rest = tok.substr(kHesitationMark.size());
  if (rest.empty() || rest == "." || rest == "?" || rest == "...") return rest;
  return std::nullopt;
}

}  // namespace detail

inline std::size_t count_hesitation_slots(std::string_view rich_text) {
  std::size_t n = 0;
  for (const auto& tok : text::split_ws(rich_text)) {
    if (detail::hesitation_slot(tok)) ++n;
  }
  return n;
}

struct CompletionRequest {
  std::string utterance_id;
  std::string rich_text;
  std::optional<std::string> audio_ref;
};

inline CompletionRequest make_request(const AnnotatedTranscript& t) {
  return {t.utterance_id(), compile_rich(t).text, t.audio_ref()};
}

struct Attachment {
  std::string kind;  // "audio"
  std::string uri;
  friend bool operator==(const Attachment&, const Attachment&) = default;
};

struct Prompt {
  std::string system_instruction;
  std::string user_message;
  std::optional<Attachment> attachment;
};

/// The labeling prompt for one utterance. Audio travels as a descriptor, not
/// inline. Requests without any "#" are never built.
inline Prompt build_prompt(const CompletionRequest& req) {
  if (count_hesitation_slots(req.rich_text) == 0) {
    throw PreconditionError(req.utterance_id + ": rich text has no hesitation tags to complete");
  }
  Prompt p{std::string(kCompletionSystemInstruction),
           std::string(kTranscriptionPrefix) + req.rich_text, std::nullopt};
  if (req.audio_ref) p.attachment = Attachment{"audio", *req.audio_ref};
  return p;
}

/// Recovers the per-"#" replacement tokens from a completion and proves that
/// nothing else changed: every non-slot token must be byte-identical and
/// every slot must keep its trailing unit mark.
inline std::vector<std::string> extract_fillers(std::string_view rich_text,
                                                std::string_view completed_text,
                                                const FillerLexicon& lexicon) {
  const auto rich = text::split_ws(rich_text);
  const auto done = text::split_ws(completed_text);
  if (rich.size() != done.size()) {
    throw ArityError("completion has " + std::to_string(done.size()) + " tokens, expected " +
                     std::to_string(rich.size()));
  }
  std::vector<std::string> fillers;
  for (std::size_t i = 0; i < rich.size(); ++i) {
    auto slot = detail::hesitation_slot(rich[i]);
    if (!slot) {
      if (done[i] != rich[i]) throw DriftError(i + 1, rich[i], done[i]);
      continue;
    }
    std::string_view tok = done[i];
    if (!text::ends_with(tok, *slot)) throw DriftError(i + 1, rich[i], done[i]);
    tok.remove_suffix(slot->size());
    if (tok.empty()) {
      throw ArityError("hesitation at token " + std::to_string(i + 1) + " was left empty");
    }
    // "um..." must not be read as "um." + ".." or similar.
    if (tok.back() == '.' || tok.back() == '?') throw DriftError(i + 1, rich[i], done[i]);
    auto filler = text::ascii_lower(tok);
    if (!lexicon.contains(filler)) {
      throw LexiconError("filler '" + filler + "' at token " + std::to_string(i + 1) +
                         " is not in the lexicon");
    }
    fillers.push_back(std::move(filler));
  }
  return fillers;
}

/// Inverse of extract_fillers: writes fillers into the "#" slots in order.
inline std::string substitute_fillers(std::string_view rich_text,
                                      const std::vector<std::string>& fillers) {
  auto toks = text::split_ws(rich_text);
  std::size_t next = 0;
  for (auto& tok : toks) {
    if (auto slot = detail::hesitation_slot(tok)) {
      if (next >= fillers.size()) throw ArityError("not enough fillers for the hesitation slots");
      tok = fillers[next++] + std::string(*slot);
    }
  }
  if (next != fillers.size()) throw ArityError("more fillers than hesitation slots");
  return text::join(toks);
}

/// Sends one prompt and returns the model's text. Implementations must be
/// safe to call from several threads at once. Transport and auth failures
/// surface as ProviderError.
class CompletionProvider {
public:
  virtual ~CompletionProvider() = default;
  virtual std::string name() const = 0;
  virtual std::string send(const Prompt& prompt) const = 0;
};

/// Offline provider: fills every "#" with one fixed filler.
class StubProvider final : public CompletionProvider {
public:
  explicit StubProvider(std::string filler = "um") : filler_(std::move(filler)) {}

  std::string name() const override { return "stub"; }

  std::string send(const Prompt& prompt) const override {
    std::string_view msg = prompt.user_message;
    if (msg.starts_with(kTranscriptionPrefix)) msg.remove_prefix(kTranscriptionPrefix.size());
    auto toks = text::split_ws(msg);
    for (auto& tok : toks) {
      if (auto slot = detail::hesitation_slot(tok)) tok = filler_ + std::string(*slot);
    }
    return text::join(toks);
  }

private:
  std::string filler_;
};

struct CompletionPolicy {
  int retry_budget = 2;
  bool fallback = true;
};

struct CompletionResult {
  std::string utterance_id;
  std::vector<std::string> fillers;
  std::string provider_name;
  std::optional<std::string> raw_response;
  bool fallback = false;
  bool degraded = false;  // no audio attached
  int attempts = 0;
};

namespace detail {

// Models sometimes echo the prompt prefix or wrap the answer in whitespace.
inline std::string_view strip_response(std::string_view response) {
  response = text::trim(response);
  if (response.starts_with(kTranscriptionPrefix)) {
    response.remove_prefix(kTranscriptionPrefix.size());
  } else if (response.starts_with("transcription:")) {
    response.remove_prefix(std::string_view("transcription:").size());
  }
  return text::trim(response);
}

}  // namespace detail

/// Asks the provider for fillers and validates the answer. Validation and
/// transport failures are retried `retry_budget` times; after that the
/// result falls back to the lexicon default (flagged), or the last error is
/// rethrown when fallback is disabled.
inline CompletionResult complete(const CompletionRequest& req, const CompletionProvider& provider,
                                 const FillerLexicon& lexicon, const CompletionPolicy& policy = {}) {
  CompletionResult result{req.utterance_id, {}, provider.name(), std::nullopt, false,
                          !req.audio_ref.has_value(), 0};
  const auto slots = count_hesitation_slots(req.rich_text);
  if (slots == 0) return result;

  const auto prompt = build_prompt(req);
  std::exception_ptr last_error;
  for (int attempt = 0; attempt <= std::max(0, policy.retry_budget); ++attempt) {
    ++result.attempts;
    try {
      auto raw = provider.send(prompt);
      result.raw_response = raw;
      result.fillers = extract_fillers(req.rich_text, detail::strip_response(raw), lexicon);
      return result;
    } catch (const DriftError&) {
      last_error = std::current_exception();
    } catch (const ArityError&) {
      last_error = std::current_exception();
    } catch (const LexiconError&) {
      last_error = std::current_exception();
    } catch (const ProviderError&) {
      last_error = std::current_exception();
    }
  }
  if (!policy.fallback) std::rethrow_exception(last_error);
  result.fillers.assign(slots, lexicon.default_filler());
  result.fallback = true;
  return result;
}

/// Runs requests with at most `max_in_flight` outstanding provider calls.
/// Results come back sorted by utterance_id regardless of completion order.
inline std::vector<CompletionResult> complete_batch(const std::vector<CompletionRequest>& requests,
                                                    const CompletionProvider& provider,
                                                    const FillerLexicon& lexicon,
                                                    const CompletionPolicy& policy = {},
                                                    int max_in_flight = 4) {
  std::vector<CompletionResult> results(requests.size());
  std::vector<std::exception_ptr> errors(requests.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < requests.size();) {
      try {
        results[i] = complete(requests[i], provider, lexicon, policy);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n_workers = std::min<std::size_t>(std::max(1, max_in_flight), requests.size());
  {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::sort(results.begin(), results.end(),
            [](const auto& a, const auto& b) { return a.utterance_id < b.utterance_id; });
  return results;
}

inline nlohmann::ordered_json to_json(const CompletionResult& r) {
  nlohmann::ordered_json j;
  j["utterance_id"] = r.utterance_id;
  j["fillers"] = r.fillers;
  j["fallback"] = r.fallback;
  return j;
}

struct CompletionRecord {
  std::string utterance_id;
  std::vector<std::string> fillers;
  bool fallback = false;
  friend bool operator==(const CompletionRecord&, const CompletionRecord&) = default;
};

// Batch output format: one {"utterance_id", "fillers", "fallback"} per line.
inline std::string format_completions(const std::vector<CompletionResult>& results) {
  std::string out;
  for (const auto& r : results) out += to_json(r).dump() + "\n";
  return out;
}

inline std::vector<CompletionRecord> parse_completions(std::string_view doc) {
  std::vector<CompletionRecord> out;
  std::size_t line_no = 0;
  for (auto line : io::lines(doc)) {
    ++line_no;
    line = text::trim(line);
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      out.push_back({j.at("utterance_id").get<std::string>(),
                     j.at("fillers").get<std::vector<std::string>>(), j.value("fallback", false)});
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("completions line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace verbatim
