#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "verbatim/errors.hpp"

// Fine-tuning hyperparameters as a checkable, serializable bundle. Nothing
// here trains a model; downstream harnesses consume the emitted manifest.

namespace verbatim::training {

enum class Projection { query, key, value, output, ffn1, ffn2 };

inline constexpr std::array kAllProjections = {Projection::query,  Projection::key,
                                               Projection::value,  Projection::output,
                                               Projection::ffn1,   Projection::ffn2};

inline std::string_view to_string(Projection p) noexcept {
  switch (p) {
    case Projection::query: return "query";
    case Projection::key: return "key";
    case Projection::value: return "value";
    case Projection::output: return "output";
    case Projection::ffn1: return "ffn1";
    case Projection::ffn2: return "ffn2";
  }
  return "?";
}

inline std::optional<Projection> parse_projection(std::string_view s) noexcept {
  for (auto p : kAllProjections) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

enum class ScaleMode { rank_stabilized, standard };

/// LoRA update scale: alpha/sqrt(r) when rank-stabilized, alpha/r otherwise.
inline double lora_scale(int rank, double alpha, ScaleMode mode = ScaleMode::rank_stabilized) {
  if (rank < 1) throw DomainError("LoRA rank must be >= 1, got " + std::to_string(rank));
  const double r = static_cast<double>(rank);
  return mode == ScaleMode::rank_stabilized ? alpha / std::sqrt(r) : alpha / r;
}

inline double rslora_scale(int rank, double alpha) { return lora_scale(rank, alpha); }

struct LoraSpec {
  int rank = 32;
  double alpha = 8.0;
  double dropout = 0.05;
  std::set<Projection> target_projections{kAllProjections.begin(), kAllProjections.end()};
  bool rank_stabilized = true;

  double scale() const {
    return lora_scale(rank, alpha, rank_stabilized ? ScaleMode::rank_stabilized : ScaleMode::standard);
  }

  void validate() const {
    if (rank < 1) throw ValidationError("lora.rank must be >= 1");
    if (!(alpha > 0)) throw ValidationError("lora.alpha must be positive");
    if (!(dropout >= 0 && dropout < 1)) throw ValidationError("lora.dropout must lie in [0, 1)");
    if (target_projections.empty()) throw ValidationError("lora.target_projections is empty");
  }

  friend bool operator==(const LoraSpec&, const LoraSpec&) = default;
};

// AdamW.
struct OptimizerSpec {
  double learning_rate = 7e-5;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double epsilon = 1e-6;
  double weight_decay = 0.01;

  void validate() const {
    if (!(learning_rate > 0)) throw ValidationError("optimizer.learning_rate must be positive");
    if (!(beta1 > 0 && beta1 < 1)) throw ValidationError("optimizer.beta1 must lie in (0, 1)");
    if (!(beta2 > 0 && beta2 < 1)) throw ValidationError("optimizer.beta2 must lie in (0, 1)");
    if (!(epsilon > 0)) throw ValidationError("optimizer.epsilon must be positive");
    if (!(weight_decay >= 0)) throw ValidationError("optimizer.weight_decay must be non-negative");
  }

  friend bool operator==(const OptimizerSpec&, const OptimizerSpec&) = default;
};

enum class PresetName { challenge, post_challenge };

inline std::string_view to_string(PresetName p) noexcept {
  return p == PresetName::challenge ? "challenge" : "post_challenge";
}

// Accepts both "post_challenge" and the CLI spelling "post-challenge".
inline std::optional<PresetName> parse_preset(std::string_view s) noexcept {
  if (s == "challenge") return PresetName::challenge;
  if (s == "post_challenge" || s == "post-challenge") return PresetName::post_challenge;
  return std::nullopt;
}

struct SchedulePreset {
  PresetName name = PresetName::challenge;
  std::string base_model;
  std::string training_splits;
  int per_device_batch = 0;
  int grad_accum_steps = 0;
  int total_steps = 0;
  double approx_epochs = 0;
  std::optional<int> eval_every_steps;
  std::string lr_schedule = "constant";

  int effective_batch() const noexcept { return per_device_batch * grad_accum_steps; }

  void validate() const {
    if (per_device_batch <= 0) throw ValidationError("schedule.per_device_batch must be positive");
    if (grad_accum_steps <= 0) throw ValidationError("schedule.grad_accum_steps must be positive");
    if (total_steps <= 0) throw ValidationError("schedule.total_steps must be positive");
    if (eval_every_steps && *eval_every_steps <= 0) {
      throw ValidationError("schedule.eval_every_steps must be positive");
    }
  }

  friend bool operator==(const SchedulePreset&, const SchedulePreset&) = default;
};

// Whisper Large V3 on train+dev: 32 x 32 = 1,024 samples/step for 28 steps.
inline SchedulePreset challenge_preset() {
  return {PresetName::challenge, "whisper-large-v3", "train+dev", 32, 32, 28, 4.5, std::nullopt,
          "constant"};
}

// Whisper Large V3 Turbo on train only: batch 32, no accumulation, 732 steps,
// evaluated and checkpointed every 122 steps.
inline SchedulePreset post_challenge_preset() {
  return {PresetName::post_challenge, "whisper-large-v3-turbo", "train", 32, 1, 732, 6.0, 122,
          "constant"};
}

inline SchedulePreset preset(PresetName name) {
  return name == PresetName::challenge ? challenge_preset() : post_challenge_preset();
}

struct FineTuneConfig {
  SchedulePreset schedule;
  LoraSpec lora;
  OptimizerSpec optimizer;

  friend bool operator==(const FineTuneConfig&, const FineTuneConfig&) = default;
};

inline FineTuneConfig builtin_config(PresetName name) { return {preset(name), {}, {}}; }

inline nlohmann::ordered_json emit_manifest(const SchedulePreset& sched, const LoraSpec& lora,
                                            const OptimizerSpec& opt) {
  sched.validate();
  lora.validate();
  opt.validate();
  using nlohmann::ordered_json;
  ordered_json targets = ordered_json::array();
  for (auto p : lora.target_projections) targets.push_back(std::string(to_string(p)));

  ordered_json m;
  m["preset"] = std::string(to_string(sched.name));
  m["base_model"] = sched.base_model;
  m["training_splits"] = sched.training_splits;
  m["schedule"] = {
      {"per_device_batch", sched.per_device_batch},
      {"grad_accum_steps", sched.grad_accum_steps},
      {"effective_batch", sched.effective_batch()},
      {"total_steps", sched.total_steps},
      {"approx_epochs", sched.approx_epochs},
      {"eval_every_steps", sched.eval_every_steps ? ordered_json(*sched.eval_every_steps)
                                                  : ordered_json(nullptr)},
      {"lr_schedule", sched.lr_schedule},
  };
  m["lora"] = {
      {"rank", lora.rank},
      {"alpha", lora.alpha},
      {"dropout", lora.dropout},
      {"target_projections", std::move(targets)},
      {"rank_stabilized", lora.rank_stabilized},
      {"scale", lora.scale()},
  };
  m["optimizer"] = {
      {"name", "adamw"},
      {"learning_rate", opt.learning_rate},
      {"beta1", opt.beta1},
      {"beta2", opt.beta2},
      {"epsilon", opt.epsilon},
      {"weight_decay", opt.weight_decay},
  };
  return m;
}

inline nlohmann::ordered_json emit_manifest(const FineTuneConfig& c) {
  return emit_manifest(c.schedule, c.lora, c.optimizer);
}

/// Inverse of emit_manifest. Derived fields (effective batch, scale) are
/// recomputed and checked against the stored values.
inline FineTuneConfig parse_manifest(const nlohmann::json& m) {
  try {
    FineTuneConfig c;
    auto name = parse_preset(m.at("preset").get<std::string>());
    if (!name) throw ValidationError("unknown preset '" + m.at("preset").get<std::string>() + "'");
    const auto& s = m.at("schedule");
    c.schedule.name = *name;
    c.schedule.base_model = m.at("base_model").get<std::string>();
    c.schedule.training_splits = m.at("training_splits").get<std::string>();
    c.schedule.per_device_batch = s.at("per_device_batch").get<int>();
    c.schedule.grad_accum_steps = s.at("grad_accum_steps").get<int>();
    c.schedule.total_steps = s.at("total_steps").get<int>();
    c.schedule.approx_epochs = s.at("approx_epochs").get<double>();
    if (!s.at("eval_every_steps").is_null()) c.schedule.eval_every_steps = s.at("eval_every_steps").get<int>();
    c.schedule.lr_schedule = s.at("lr_schedule").get<std::string>();

    const auto& l = m.at("lora");
    c.lora.rank = l.at("rank").get<int>();
    c.lora.alpha = l.at("alpha").get<double>();
    c.lora.dropout = l.at("dropout").get<double>();
    c.lora.rank_stabilized = l.at("rank_stabilized").get<bool>();
    c.lora.target_projections.clear();
    for (const auto& p : l.at("target_projections")) {
      auto proj = parse_projection(p.get<std::string>());
      if (!proj) throw ValidationError("unknown projection '" + p.get<std::string>() + "'");
      c.lora.target_projections.insert(*proj);
    }

    const auto& o = m.at("optimizer");
    c.optimizer.learning_rate = o.at("learning_rate").get<double>();
    c.optimizer.beta1 = o.at("beta1").get<double>();
    c.optimizer.beta2 = o.at("beta2").get<double>();
    c.optimizer.epsilon = o.at("epsilon").get<double>();
    c.optimizer.weight_decay = o.at("weight_decay").get<double>();

    c.schedule.validate();
    c.lora.validate();
    c.optimizer.validate();
    if (s.at("effective_batch").get<int>() != c.schedule.effective_batch()) {
      throw ValidationError("schedule.effective_batch disagrees with batch x accumulation");
    }
    if (std::abs(l.at("scale").get<double>() - c.lora.scale()) > 1e-12 * c.lora.scale()) {
      throw ValidationError("lora.scale disagrees with alpha and rank");
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed training manifest: ") + e.what());
  }
}

}  // namespace verbatim::training
