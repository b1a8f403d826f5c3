// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "verbatim/completion.hpp"
#include "verbatim/ctm.hpp"
#include "verbatim/normalize.hpp"
#include "verbatim/report.hpp"
#include "verbatim/scheme.hpp"
#include "verbatim/training_config.hpp"
#include "verbatim/wer.hpp"

using namespace verbatim;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

Outcome ac1_scheme_equivalence() {
  const auto t0 = Clock::now();
  gen::Rng rng(1001);
  const FillerLexicon lexicon({"um", "uh", "er", "hmm", "mm"}, "um");
  const NormalizationConfig cfg{lexicon};
  const int n = 2000;
  std::size_t hesitation_only_units = 0, hesitations = 0;
  for (int i = 0; i < n; ++i) {
    auto t = gen::annotated_transcript(rng, "u" + std::to_string(i));
    for (const auto& u : t.units()) {
      if (std::all_of(u.tokens().begin(), u.tokens().end(), [](auto& k) { return k.is_hesitation(); })) {
        ++hesitation_only_units;
      }
    }
    hesitations += t.hesitation_count();
    const auto fillers = gen::fillers_for(rng, t, lexicon);
    const auto p = normalize(compile_pure(t, lexicon).text, cfg);
    const auto r = normalize(compile_rich(t).text, cfg);
    const auto e = normalize(compile_extra(t, fillers, lexicon).text, cfg);
    if (p != r || r != e) return fail("mismatch on " + t.utterance_id() + ": " + compile_rich(t).text);
  }
  const double secs = seconds_since(t0);
  if (secs >= 10) return fail("took " + std::to_string(secs) + " s");
  if (!hesitation_only_units) return fail("generator produced no hesitation-only units");
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d transcripts, %zu hesitations, %zu hesitation-only units, %.2f s", n,
                hesitations, hesitation_only_units, secs);
  return {true, buf};
}

Outcome ac2_wer_oracle() {
  gen::Rng rng(2002);
  const std::vector<std::string> vocab = {"a", "b", "c", "d"};
  std::uniform_int_distribution<int> len(0, 8);
  auto draw = [&] {
    std::vector<std::string> s(len(rng));
    for (auto& w : s) w = gen::pick(rng, vocab);
    return s;
  };
  for (int i = 0; i < 10000; ++i) {
    const auto ref = draw(), hyp = draw();
    const auto fwd = align(ref, hyp);
    const auto rev = align(hyp, ref);
    if (fwd.cost() != oracle::edit_distance(ref, hyp)) return fail("cost differs from oracle at pair " + std::to_string(i));
    const auto& a = fwd.counts;
    const auto& b = rev.counts;
    if (rev.cost() != fwd.cost() || a.substitutions != b.substitutions || a.deletions != b.insertions ||
        a.insertions != b.deletions) {
      return fail("role swap not symmetric at pair " + std::to_string(i));
    }
  }
  return {true, "10000 pairs, length <= 8, 4 symbols"};
}

Outcome ac3_delta() {
  const auto up = report::render_delta(7.2, 6.2);
  const auto down = report::render_delta(5.5, 6.2);
  if (up != "+16.1" || down != "-11.3") return fail("got " + up + " and " + down);
  return {true, "Rich " + up + ", Extra " + down};
}

Outcome ac4_rslora() {
  const double s = training::rslora_scale(32, 8);
  const double std_s = training::lora_scale(32, 8, training::ScaleMode::standard);
  char buf[96];
  std::snprintf(buf, sizeof buf, "rsLoRA %.6f, standard %.2f", s, std_s);
  if (std::abs(s - 1.414214) > 1e-6 || std_s != 0.25) return fail(buf);
  return {true, buf};
}

Outcome ac5_filter_truth_table() {
  auto tok = [](const char* dur, const char* conf) {
    return CtmToken{"u", "1", *Decimal::parse("0"), *Decimal::parse(dur), "w", Decimal::parse(conf)};
  };
  // (long, high) (long, low) (short, high) (short, low)
  const std::vector<CtmToken> quadrants = {tok("0.300", "0.9"), tok("0.300", "0.4"), tok("0.015", "0.9"),
                                           tok("0.015", "0.4")};
  const std::vector<bool> want_and = {false, false, false, true};
  const std::vector<bool> want_or = {false, true, true, true};
  for (std::size_t i = 0; i < 4; ++i) {
    const bool short_dur = i >= 2, low_conf = i % 2 == 1;
    if (oracle::filter_discards(false, short_dur, low_conf) != want_and[i] ||
        oracle::filter_discards(true, short_dur, low_conf) != want_or[i]) {
      return fail("oracle table disagrees with the expected quadrants");
    }
    if (is_artifact(quadrants[i], {}) != want_and[i]) return fail("conjunction quadrant " + std::to_string(i));
    FilterPolicy any;
    any.combine = FilterCombine::disjunction;
    if (is_artifact(quadrants[i], any) != want_or[i]) return fail("disjunction quadrant " + std::to_string(i));
  }
  FilterPolicy any;
  any.combine = FilterCombine::disjunction;
  for (const auto& boundary : {tok("0.020", "0.5"), tok("0.02", "0.50"), tok("0.0200", "0.500")}) {
    if (is_artifact(boundary, {}) || is_artifact(boundary, any)) return fail("boundary value discarded");
  }
  return {true, "and: keep/keep/keep/discard, or: keep/discard/discard/discard, boundary kept"};
}

Outcome ac6_ctm_round_trip() {
  gen::Rng rng(6006);
  std::vector<CtmToken> tokens;
  for (int i = 0; i < 10000; ++i) tokens.push_back(gen::ctm_token(rng, "utt" + std::to_string(i % 97)));
  const auto doc = serialize_ctm(tokens);
  const auto parsed = parse_ctm(doc);
  if (parsed.size() != 10000) return fail("parsed " + std::to_string(parsed.size()) + " lines");
  if (serialize_ctm(parsed) != doc) return fail("re-serialization differs");
  if (parsed != tokens) return fail("token fields differ after round trip");
  return {true, "10000 lines, " + std::to_string(doc.size()) + " bytes identical"};
}

Outcome ac7_number_words() {
  const auto table = oracle::number_words_table();
  for (int n = 0; n <= 9999; ++n) {
    auto got = number_to_words(std::to_string(n));
    if (got != table.at(n)) return fail("mismatch at " + std::to_string(n));
  }
  return {true, "0..9999 exact"};
}

Outcome ac8_drift_fuzz() {
  gen::Rng rng(8008);
  const FillerLexicon lexicon;
  const std::vector<std::string> replacements = {"um", "uh", "#", "zzz", "so.", "think?", "", "..."};
  int mutations = 0, attempts = 0;
  while (mutations < 1000) {
    if (++attempts > 100000) return fail("generator could not produce enough mutable transcripts");
    auto t = gen::annotated_transcript(rng, "f");
    const auto rich = compile_rich(t).text;
    const auto fillers = gen::fillers_for(rng, t, lexicon);
    auto toks = text::split_ws(substitute_fillers(rich, fillers));
    const auto rich_toks = text::split_ws(rich);
    std::vector<std::size_t> words;
    for (std::size_t k = 0; k < rich_toks.size(); ++k) {
      if (!rich_toks[k].starts_with("#")) words.push_back(k);
    }
    if (words.empty()) continue;
    const auto k = gen::pick(rng, words);
    std::string mutated;
    switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
      case 0: mutated = gen::pick(rng, replacements); break;        // replace
      case 1: mutated = toks[k] + "x"; break;                       // append
      case 2: mutated = toks[k].size() > 1 ? toks[k].substr(1) : "q"; break;  // truncate
      default: mutated = text::ascii_lower(toks[k]) == toks[k] ? "Z" + toks[k] : text::ascii_lower(toks[k]);
    }
    if (mutated.empty() || text::has_space(mutated) || mutated == toks[k]) continue;
    toks[k] = mutated;
    ++mutations;
    try {
      extract_fillers(rich, text::join(toks), lexicon);
      return fail("accepted mutated completion: " + text::join(toks));
    } catch (const DriftError& e) {
      if (e.position() != k + 1) return fail("drift reported at token " + std::to_string(e.position()));
    } catch (const std::exception& e) {
      return fail(std::string("wrong error kind: ") + e.what());
    }
  }
  return {true, "1000 mutations, 0 false accepts"};
}

Outcome ac9_throughput() {
  gen::Rng rng(9009);
  const auto& pool = gen::word_pool();
  std::map<std::string, TokenSequence> refs, hyps;
  std::size_t words = 0;
  for (int i = 0; i < 3200; ++i) {
    const auto id = "eval" + std::to_string(i);
    const int n = std::uniform_int_distribution<int>(25, 75)(rng);
    TokenSequence ref, hyp;
    for (int k = 0; k < n; ++k) {
      ref.push_back(gen::pick(rng, pool));
      if (gen::chance(rng, 0.9)) hyp.push_back(gen::chance(rng, 0.9) ? ref.back() : gen::pick(rng, pool));
      if (gen::chance(rng, 0.05)) hyp.push_back(gen::pick(rng, pool));
    }
    words += ref.size();
    refs[id] = std::move(ref);
    hyps[id] = std::move(hyp);
  }
  const auto t0 = Clock::now();
  const auto score = score_corpus(refs, hyps);
  const double secs = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "3200 pairs, mean %.1f tokens, WER %.1f%%, %.3f s", words / 3200.0,
                score.total.wer_pct(), secs);
  if (score.utterances.size() != 3200 || secs >= 5) return fail(buf);
  return {true, buf};
}

// Absolute WERs need model inference and are out of scope; the ingestion and
// table layouts are still checked.
Outcome ac10_layouts() {
  const std::string ctm =
      "s1 1 0.00 0.30 Hello 0.95\n"
      "s1 1 0.31 0.010 uh 0.2\n"
      "s1 1 0.40 0.25 world 0.9\n"
      "s2 1 0.00 0.40 twenty\n"
      "s2 1 0.40 0.30 five 0.8\n";
  const auto filtered = filter_artifacts(parse_ctm(ctm));
  if (filtered.discarded != 1) return fail("artifact filter discarded " + std::to_string(filtered.discarded));
  std::map<std::string, TokenSequence> hyps;
  for (auto& [id, w] : ctm_to_transcripts(filtered.kept)) hyps[id] = normalize(text::join(w));
  std::map<std::string, TokenSequence> refs{{"s1", normalize("hello world.")}, {"s2", normalize("25")}};
  const auto score = score_corpus(refs, hyps);
  if (score.total.counts.errors() != 0) return fail("CTM hypotheses did not score 0 errors");

  auto counts = [](std::size_t s, std::size_t d, std::size_t i) {
    WerReport r;
    r.counts = {10000, 10000 - s - d, s, d, i};
    return r;
  };
  const auto t4 = report::render_comparison(
      {{Scheme::pure, counts(350, 160, 110)}, {Scheme::rich, counts(370, 250, 100)}, {Scheme::extra, counts(336, 118, 96)}});
  const auto header4 = "Transcription Scheme  WER (%)  \xCE\x94 vs. Pure (%)  Substitutions (%)  Deletions (%)  Insertions (%)";
  if (t4.rfind(header4, 0) != 0 || t4.find("+16.1") == std::string::npos || t4.find("-11.3") == std::string::npos) {
    return fail("scheme table layout:\n" + t4);
  }
  const auto t2 = report::render_systems({{"system", "809M", score.total}});
  if (t2.rfind("Model Variant  Parameters  WER (%)  Substitutions (%)  Deletions (%)  Insertions (%)", 0) != 0) {
    return fail("model table layout:\n" + t2);
  }
  return {true, "excluded: absolute WERs need model inference; CTM ingestion and both table layouts verified"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1 scheme equivalence", ac1_scheme_equivalence},
      {"AC2 alignment vs exhaustive oracle", ac2_wer_oracle},
      {"AC3 relative delta", ac3_delta},
      {"AC4 rsLoRA scale", ac4_rslora},
      {"AC5 artifact filter truth table", ac5_filter_truth_table},
      {"AC6 CTM round trip", ac6_ctm_round_trip},
      {"AC7 number verbalization", ac7_number_words},
      {"AC8 completion drift detection", ac8_drift_fuzz},
      {"AC9 scoring throughput", ac9_throughput},
      {"AC10 CTM ingestion and report layouts", ac10_layouts},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS  " : "FAIL  ") << name << "  (" << o.detail << ")\n";
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed ? 1 : 0;
}
