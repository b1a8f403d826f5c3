#pragma once

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <iterator>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "verbatim/completion.hpp"
#include "verbatim/config.hpp"
#include "verbatim/corpus.hpp"
#include "verbatim/ctm.hpp"
#include "verbatim/errors.hpp"
#include "verbatim/http_provider.hpp"
#include "verbatim/io.hpp"
#include "verbatim/normalize.hpp"
#include "verbatim/report.hpp"
#include "verbatim/scheme.hpp"
#include "verbatim/training_config.hpp"
#include "verbatim/wer.hpp"

// The `verbatim` command. Exit status: 0 success, 1 data error, 2 usage error.

namespace verbatim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

namespace detail {

namespace fs = std::filesystem;

inline std::string read_input(const std::string& path, std::istream& in) {
  if (path.empty() || path == "-") {
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return io::read_file(path);
}

inline void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    out.flush();
    return;
  }
  io::write_file_atomic(path, content);
}

struct Options {
  std::string config;

  // provider / completion overrides
  std::string provider;
  std::string base_url;
  std::string model;
  int max_in_flight = 0;
  double timeout_s = 0;
  int retry_budget = -1;
  bool no_fallback = false;

  // compile / complete
  std::string manifest;
  std::string split = "train";
  std::string out_dir;
  std::vector<std::string> schemes;
  std::string completions;

  // filter-ctm
  std::string min_dur_ms;
  std::string min_conf;
  std::string combine;
  std::string tsv;

  // shared io
  std::string input = "-";
  std::string output = "-";

  // score
  std::string ref;
  std::string hyp;
  std::string hyp_ctm;
  bool pre_normalized = false;
  std::string per_utt;
  std::string json_out;
  std::string label = "system";
  std::string parameters;

  // report
  std::vector<std::string> score_files;
  std::string layout = "schemes";
  std::string baseline = "pure";

  // emit-config
  std::string preset;
};

inline PipelineConfig resolve_config(const Options& o, const CLI::App& app) {
  PipelineConfig cfg = load_config(o.config.empty() ? std::nullopt : std::optional(o.config));
  auto given = [&](const char* name) {
    for (const auto* sub : app.get_subcommands()) {
      if (auto* opt = sub->get_option_no_throw(name); opt && opt->count() > 0) return true;
    }
    return false;
  };
  if (given("--base-url")) cfg.provider_base_url = o.base_url;
  if (given("--model")) cfg.provider_model = o.model;
  if (given("--max-in-flight")) cfg.provider_max_in_flight = o.max_in_flight;
  if (given("--timeout-s")) cfg.provider_timeout_s = o.timeout_s;
  if (given("--retry-budget")) cfg.completion.retry_budget = o.retry_budget;
  if (given("--no-fallback")) cfg.completion.fallback = false;
  if (given("--min-dur-ms")) {
    auto d = Decimal::parse(o.min_dur_ms);
    if (!d) throw UsageError("--min-dur-ms expects a non-negative decimal");
    cfg.filter.min_dur_s = millis_to_seconds(*d);
  }
  if (given("--min-conf")) {
    auto d = Decimal::parse(o.min_conf);
    if (!d) throw UsageError("--min-conf expects a decimal in [0, 1]");
    cfg.filter.min_conf = *d;
  }
  if (given("--combine")) cfg.filter.combine = parse_combine(o.combine);
  try {
    cfg.filter.validate();
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  if (cfg.provider_max_in_flight < 1) throw UsageError("--max-in-flight must be >= 1");
  if (cfg.completion.retry_budget < 0) throw UsageError("--retry-budget must be >= 0");
  return cfg;
}

inline std::unique_ptr<CompletionProvider> make_provider(const std::string& kind,
                                                         const PipelineConfig& cfg) {
  if (kind == "stub") return std::make_unique<StubProvider>(cfg.lexicon.default_filler());
  if (cfg.provider_base_url.empty() || cfg.provider_model.empty()) {
    throw UsageError("the http provider needs provider.base_url and provider.model");
  }
  return std::make_unique<HttpProvider>(HttpProvider::from_env(
      {cfg.provider_base_url, cfg.provider_model, std::nullopt, cfg.provider_timeout_s}));
}

inline std::vector<AnnotatedTranscript> load_transcripts(const Options& o) {
  auto split = parse_split(o.split);
  if (!split) throw UsageError("--split must be train, dev or eval");
  return load_corpus(load_manifest(o.manifest, *split));
}

inline std::vector<CompletionResult> run_completion(const std::vector<AnnotatedTranscript>& corpus,
                                                    const CompletionProvider& provider,
                                                    const PipelineConfig& cfg) {
  std::vector<CompletionRequest> requests;
  requests.reserve(corpus.size());
  for (const auto& t : corpus) requests.push_back(make_request(t));
  return complete_batch(requests, provider, cfg.lexicon, cfg.completion, cfg.provider_max_in_flight);
}

inline int cmd_complete(const Options& o, const PipelineConfig& cfg, Streams s) {
  const auto corpus = load_transcripts(o);
  auto provider = make_provider(o.provider.empty() ? "stub" : o.provider, cfg);
  const auto results = run_completion(corpus, *provider, cfg);
  write_output(o.output, format_completions(results), s.out);
  const auto fallbacks = std::count_if(results.begin(), results.end(), [](auto& r) { return r.fallback; });
  s.err << "completed " << results.size() << " utterances with " << provider->name() << " ("
        << fallbacks << " fallback)\n";
  return kExitOk;
}

inline int cmd_compile(const Options& o, const PipelineConfig& cfg, Streams s) {
  std::set<Scheme> schemes;
  for (const auto& name : o.schemes) {
    if (name == "all") {
      schemes.insert(kAllSchemes.begin(), kAllSchemes.end());
    } else if (auto sch = parse_scheme(name)) {
      schemes.insert(*sch);
    } else {
      throw UsageError("unknown scheme '" + name + "'");
    }
  }
  if (schemes.empty()) schemes = {Scheme::pure, Scheme::rich};
  if (schemes.contains(Scheme::extra) && o.completions.empty() && o.provider.empty()) {
    throw UsageError("--scheme extra needs --completions FILE or --provider {stub,http}");
  }

  const auto corpus = load_transcripts(o);

  std::map<std::string, std::vector<std::string>> fillers;
  if (schemes.contains(Scheme::extra)) {
    if (!o.completions.empty()) {
      for (auto& rec : parse_completions(io::read_file(o.completions))) {
        fillers[rec.utterance_id] = std::move(rec.fillers);
      }
    } else {
      auto provider = make_provider(o.provider, cfg);
      for (auto& r : run_completion(corpus, *provider, cfg)) {
        fillers[r.utterance_id] = std::move(r.fillers);
      }
    }
  }

  fs::create_directories(o.out_dir);
  static const std::vector<std::string> kNone;
  for (auto scheme : schemes) {
    std::vector<io::TsvRecord> records;
    records.reserve(corpus.size());
    for (const auto& t : corpus) {
      PlainTranscript p;
      switch (scheme) {
        case Scheme::pure: p = compile_pure(t, cfg.lexicon); break;
        case Scheme::rich: p = compile_rich(t); break;
        case Scheme::extra: {
          auto it = fillers.find(t.utterance_id());
          p = compile_extra(t, it == fillers.end() ? kNone : it->second, cfg.lexicon);
          break;
        }
      }
      records.push_back({p.utterance_id, p.text});
    }
    const auto path = fs::path(o.out_dir) / (std::string(to_string(scheme)) + ".tsv");
    io::write_file_atomic(path, io::format_tsv(records));
    s.err << "wrote " << path.string() << " (" << records.size() << " utterances)\n";
  }
  return kExitOk;
}

inline int cmd_filter_ctm(const Options& o, const PipelineConfig& cfg, Streams s) {
  const auto tokens = parse_ctm(read_input(o.input, s.in));
  const auto result = filter_artifacts(tokens, cfg.filter);
  write_output(o.output, serialize_ctm(result.kept), s.out);
  if (!o.tsv.empty()) {
    std::vector<io::TsvRecord> records;
    for (auto& [id, words] : ctm_to_transcripts(result.kept)) {
      records.push_back({id, text::join(words)});
    }
    io::write_file_atomic(o.tsv, io::format_tsv(records));
  }
  s.err << "kept " << result.kept.size() << " tokens, discarded " << result.discarded << "\n";
  return kExitOk;
}

inline int cmd_normalize(const Options& o, const PipelineConfig& cfg, Streams s) {
  auto records = io::parse_tsv(read_input(o.input, s.in));
  for (auto& r : records) r.text = text::join(normalize(r.text, cfg.normalization));
  write_output(o.output, io::format_tsv(records), s.out);
  return kExitOk;
}

inline std::map<std::string, TokenSequence> tsv_sequences(const std::string& path,
                                                          const NormalizationConfig& norm,
                                                          bool pre_normalized) {
  std::map<std::string, TokenSequence> out;
  for (auto& r : io::parse_tsv(io::read_file(path))) {
    out[r.id] = pre_normalized ? text::split_ws(r.text) : normalize(r.text, norm);
  }
  return out;
}

inline int cmd_score(const Options& o, const PipelineConfig& cfg, Streams s) {
  if (o.hyp.empty() == o.hyp_ctm.empty()) throw UsageError("give exactly one of --hyp or --hyp-ctm");
  const auto refs = tsv_sequences(o.ref, cfg.normalization, o.pre_normalized);
  std::map<std::string, TokenSequence> hyps;
  if (!o.hyp.empty()) {
    hyps = tsv_sequences(o.hyp, cfg.normalization, o.pre_normalized);
  } else {
    for (auto& [id, words] : ctm_to_transcripts(parse_ctm(io::read_file(o.hyp_ctm)))) {
      hyps[id] = o.pre_normalized ? words : normalize(text::join(words), cfg.normalization);
    }
  }
  const auto score = score_corpus(refs, hyps);

  if (!o.per_utt.empty()) {
    std::string lines;
    for (const auto& u : score.utterances) {
      const auto& c = u.alignment.counts;
      nlohmann::ordered_json j;
      j["utterance_id"] = u.utterance_id;
      j["n_ref"] = c.n_ref;
      j["substitutions"] = c.substitutions;
      j["deletions"] = c.deletions;
      j["insertions"] = c.insertions;
      j["wer_pct"] = c.n_ref ? nlohmann::ordered_json(WerReport{c}.wer_pct()) : nlohmann::ordered_json(nullptr);
      lines += j.dump() + "\n";
    }
    io::write_file_atomic(o.per_utt, lines);
  }
  if (!o.json_out.empty()) {
    io::write_file_atomic(o.json_out, report::score_to_json(score.total, o.label, o.parameters).dump(2) + "\n");
  }
  s.out << report::render_systems({{o.label, o.parameters, score.total}});
  s.out << "WER " << report::fixed1(score.total.wer_pct()) << "% over " << score.total.counts.n_ref
        << " reference words in " << score.utterances.size()
        << (score.utterances.size() == 1 ? " utterance\n" : " utterances\n");
  return kExitOk;
}

inline int cmd_report(const Options& o, Streams s) {
  std::vector<report::SystemResult> systems;
  for (const auto& path : o.score_files) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(io::read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(path + ": " + e.what());
    }
    systems.push_back(report::score_from_json(j));
  }
  std::string table, tsv;
  if (o.layout == "models") {
    table = report::render_systems(systems);
    tsv = report::render_systems_tsv(systems);
  } else {
    auto baseline = parse_scheme(o.baseline);
    if (!baseline) throw UsageError("--baseline must be pure, rich or extra");
    std::vector<report::SchemeResult> results;
    for (const auto& sys : systems) {
      auto scheme = parse_scheme(text::ascii_lower(sys.label));
      if (!scheme) throw ValidationError("score label '" + sys.label + "' is not a scheme name");
      results.push_back({*scheme, sys.report});
    }
    const auto cmp = report::build_comparison(results, *baseline);
    table = report::render_comparison(cmp);
    tsv = report::render_comparison_tsv(cmp);
  }
  s.out << table;
  if (!o.tsv.empty()) io::write_file_atomic(o.tsv, tsv);
  return kExitOk;
}

inline int cmd_emit_config(const Options& o, Streams s) {
  auto name = training::parse_preset(o.preset);
  if (!name) throw UsageError("--preset must be challenge or post-challenge");
  write_output(o.output, training::emit_manifest(training::builtin_config(*name)).dump(2) + "\n", s.out);
  return kExitOk;
}

inline void add_provider_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--provider", o.provider, "Completion provider")
      ->check(CLI::IsMember({"stub", "http"}));
  cmd->add_option("--base-url", o.base_url, "provider.base_url");
  cmd->add_option("--model", o.model, "provider.model");
  cmd->add_option("--max-in-flight", o.max_in_flight, "provider.max_in_flight");
  cmd->add_option("--timeout-s", o.timeout_s, "provider.timeout_s");
  cmd->add_option("--retry-budget", o.retry_budget, "completion.retry_budget");
  cmd->add_flag("--no-fallback", o.no_fallback, "Fail instead of falling back to the default filler");
}

}  // namespace detail

/// Runs one CLI invocation. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, Streams s) {
  detail::Options o;
  CLI::App app{"Verbatim transcript toolkit: compile training targets, complete hesitations, "
               "filter CTM, normalize and score."};
  app.name("verbatim");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", o.config, "Key-value config file")->check(CLI::ExistingFile);

  auto* compile = app.add_subcommand("compile", "Compile annotated transcripts into training targets");
  compile->add_option("--manifest", o.manifest, "JSON-lines manifest")->required()->check(CLI::ExistingFile);
  compile->add_option("--split", o.split, "Corpus split")->check(CLI::IsMember({"train", "dev", "eval"}));
  compile->add_option("--out-dir", o.out_dir, "Directory for <scheme>.tsv outputs")->required();
  compile->add_option("--scheme", o.schemes, "pure, rich, extra or all (repeatable; default pure,rich)");
  compile->add_option("--completions", o.completions, "Completion JSON lines for the extra scheme")
      ->check(CLI::ExistingFile);
  detail::add_provider_flags(compile, o);

  auto* complete_cmd = app.add_subcommand("complete", "Fill '#' hesitation tags via a provider");
  complete_cmd->add_option("--manifest", o.manifest, "JSON-lines manifest")->required()->check(CLI::ExistingFile);
  complete_cmd->add_option("--split", o.split, "Corpus split")->check(CLI::IsMember({"train", "dev", "eval"}));
  complete_cmd->add_option("-o,--output", o.output, "Completion JSON lines (default stdout)");
  detail::add_provider_flags(complete_cmd, o);

  auto* filter = app.add_subcommand("filter-ctm", "Drop short, low-confidence CTM tokens");
  filter->add_option("input", o.input, "CTM file (default stdin)");
  filter->add_option("-o,--output", o.output, "Filtered CTM (default stdout)");
  filter->add_option("--min-dur-ms", o.min_dur_ms, "Duration threshold in ms (default 20)");
  filter->add_option("--min-conf", o.min_conf, "Confidence threshold (default 0.5)");
  filter->add_option("--combine", o.combine, "and | or")->check(CLI::IsMember({"and", "or"}));
  filter->add_option("--tsv", o.tsv, "Also write id<TAB>text hypotheses here");

  auto* norm = app.add_subcommand("normalize", "Normalize id<TAB>text lines for scoring");
  norm->add_option("-i,--input", o.input, "Input (default stdin)");
  norm->add_option("-o,--output", o.output, "Output (default stdout)");

  auto* score = app.add_subcommand("score", "Score hypotheses against references");
  score->add_option("--ref", o.ref, "Reference id<TAB>text file")->required()->check(CLI::ExistingFile);
  score->add_option("--hyp", o.hyp, "Hypothesis id<TAB>text file")->check(CLI::ExistingFile);
  score->add_option("--hyp-ctm", o.hyp_ctm, "Hypothesis CTM file")->check(CLI::ExistingFile);
  score->add_flag("--pre-normalized", o.pre_normalized, "Inputs are already normalized");
  score->add_option("--per-utt", o.per_utt, "Per-utterance JSON lines output");
  score->add_option("--json", o.json_out, "Corpus score JSON output (input to `report`)");
  score->add_option("--label", o.label, "Row label (scheme or model name)");
  score->add_option("--parameters", o.parameters, "Parameter count shown in the models layout");

  auto* rep = app.add_subcommand("report", "Render score JSON files as a comparison table");
  rep->add_option("scores", o.score_files, "Score JSON files")->required()->check(CLI::ExistingFile);
  rep->add_option("--layout", o.layout, "schemes | models")->check(CLI::IsMember({"schemes", "models"}));
  rep->add_option("--baseline", o.baseline, "Baseline scheme for the delta column")
      ->check(CLI::IsMember({"pure", "rich", "extra"}));
  rep->add_option("--tsv", o.tsv, "Also write the table as TSV");

  auto* emit = app.add_subcommand("emit-config", "Write a fine-tuning manifest");
  emit->add_option("--preset", o.preset, "challenge | post-challenge")
      ->required()
      ->check(CLI::IsMember({"challenge", "post-challenge", "post_challenge"}));
  emit->add_option("-o,--output", o.output, "Manifest path (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    s.out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    s.out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    s.err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (emit->parsed()) return detail::cmd_emit_config(o, s);
    if (rep->parsed()) return detail::cmd_report(o, s);
    const auto cfg = detail::resolve_config(o, app);
    if (compile->parsed()) return detail::cmd_compile(o, cfg, s);
    if (complete_cmd->parsed()) return detail::cmd_complete(o, cfg, s);
    if (filter->parsed()) return detail::cmd_filter_ctm(o, cfg, s);
    if (norm->parsed()) return detail::cmd_normalize(o, cfg, s);
    if (score->parsed()) return detail::cmd_score(o, cfg, s);
  } catch (const UsageError& e) {
    s.err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    s.err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    s.err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace verbatim::cli
