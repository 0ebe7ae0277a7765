// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mind/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <variant>

#include <json.hpp>

#include "binary_io.hpp"
#include "mind/error.hpp"
#include "mind/micro_encoder.hpp"
#include "mind/nn/rng.hpp"

namespace mind::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;

// --- config ------------------------------------------------------------------

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(Errc::ConfigError, msg); }

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      config_error("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read_key(const json& obj, std::string_view key, T& dst, const std::string& where) {
  const std::string k(key);
  if (!obj.contains(k)) return;
  try {
    dst = obj.at(k).get<T>();
  } catch (const json::exception& e) {
    config_error(where + "." + k + ": " + e.what());
  }
}

template <class T>
void read_positive(const json& obj, std::string_view key, T& dst, const std::string& where) {
  read_key(obj, key, dst, where);
  if (!(dst > T{})) config_error(where + "." + std::string(key) + " must be positive");
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

}  // namespace

PipelineConfig parse_config(const std::string& text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, {"seed", "jobs", "status", "fusion", "paths", "judge"}, "config");

  PipelineConfig cfg;
  read_key(j, "seed", cfg.seed, "config");
  read_positive(j, "jobs", cfg.jobs, "config");
  cfg.fusion.seed = cfg.seed;

  if (j.contains("status")) {
    const json& s = j["status"];
    check_keys(s, {"alpha", "beta", "tau", "normalize_sad"}, "status");
    read_key(s, "alpha", cfg.status.alpha, "status");
    read_key(s, "beta", cfg.status.beta, "status");
    read_key(s, "tau", cfg.status.tau, "status");
    read_key(s, "normalize_sad", cfg.status.normalize_sad, "status");
    try {
      validate(cfg.status);
    } catch (const Error& e) {
      config_error(e.what());
    }
  }

  if (j.contains("fusion")) {
    const json& f = j["fusion"];
    check_keys(f, {"d_me", "d_complex", "d_eye", "d_head", "d_llm", "num_heads", "mlp_hidden",
                   "layernorm_epsilon", "seed", "input_dims"},
               "fusion");
    read_key(f, "d_me", cfg.fusion.d_me, "fusion");
    read_key(f, "d_complex", cfg.fusion.d_complex, "fusion");
    read_key(f, "d_eye", cfg.fusion.d_eye, "fusion");
    read_key(f, "d_head", cfg.fusion.d_head, "fusion");
    read_key(f, "d_llm", cfg.fusion.d_llm, "fusion");
    read_key(f, "num_heads", cfg.fusion.num_heads, "fusion");
    read_key(f, "mlp_hidden", cfg.fusion.mlp_hidden, "fusion");
    read_key(f, "layernorm_epsilon", cfg.fusion.layernorm_epsilon, "fusion");
    read_key(f, "seed", cfg.fusion.seed, "fusion");
    if (f.contains("input_dims")) {
      const json& d = f["input_dims"];
      check_keys(d, {"head", "eye", "emo", "lip"}, "fusion.input_dims");
      read_key(d, "head", cfg.fusion.input.head, "fusion.input_dims");
      read_key(d, "eye", cfg.fusion.input.eye, "fusion.input_dims");
      read_key(d, "emo", cfg.fusion.input.emo, "fusion.input_dims");
      read_key(d, "lip", cfg.fusion.input.lip, "fusion.input_dims");
    }
  }
  try {
    validate(cfg.fusion);
  } catch (const Error& e) {
    config_error(e.what());
  }

  if (j.contains("paths")) {
    const json& p = j["paths"];
    check_keys(p, {"input_dir", "annotation_file", "output_dir", "checkpoint"}, "paths");
    std::string s;
    if (p.contains("input_dir")) { read_key(p, "input_dir", s, "paths"); cfg.paths.input_dir = s; }
    if (p.contains("annotation_file")) { read_key(p, "annotation_file", s, "paths"); cfg.paths.annotation_file = s; }
    if (p.contains("output_dir")) { read_key(p, "output_dir", s, "paths"); cfg.paths.output_dir = s; }
    if (p.contains("checkpoint") && !p["checkpoint"].is_null()) {
      read_key(p, "checkpoint", s, "paths");
      cfg.paths.checkpoint = fs::path(s);
    }
  }
  cfg.paths.input_dir = resolve(base_dir, cfg.paths.input_dir);
  cfg.paths.annotation_file = resolve(base_dir, cfg.paths.annotation_file);
  cfg.paths.output_dir = resolve(base_dir, cfg.paths.output_dir);
  if (cfg.paths.checkpoint) cfg.paths.checkpoint = resolve(base_dir, *cfg.paths.checkpoint);

  if (j.contains("judge")) {
    const json& g = j["judge"];
    check_keys(g, {"mode", "endpoint", "api_key_env", "concurrency", "timeout_ms", "max_attempts",
                   "backoff_initial_ms", "backoff_factor", "backoff_max_ms", "audit_log"},
               "judge");
    std::string mode = "mock";
    read_key(g, "mode", mode, "judge");
    if (mode == "mock") cfg.judge.mode = JudgeMode::Mock;
    else if (mode == "remote") cfg.judge.mode = JudgeMode::Remote;
    else config_error("judge.mode must be 'mock' or 'remote', got '" + mode + "'");
    read_key(g, "endpoint", cfg.judge.remote.endpoint, "judge");
    read_key(g, "api_key_env", cfg.judge.remote.api_key_env, "judge");
    read_positive(g, "concurrency", cfg.judge.concurrency, "judge");
    long long ms = cfg.judge.remote.timeout.count();
    read_positive(g, "timeout_ms", ms, "judge");
    cfg.judge.remote.timeout = std::chrono::milliseconds(ms);
    read_positive(g, "max_attempts", cfg.judge.remote.max_attempts, "judge");
    ms = cfg.judge.remote.backoff_initial.count();
    read_key(g, "backoff_initial_ms", ms, "judge");
    cfg.judge.remote.backoff_initial = std::chrono::milliseconds(ms);
    read_positive(g, "backoff_factor", cfg.judge.remote.backoff_factor, "judge");
    ms = cfg.judge.remote.backoff_max.count();
    read_key(g, "backoff_max_ms", ms, "judge");
    cfg.judge.remote.backoff_max = std::chrono::milliseconds(ms);
    if (g.contains("audit_log")) {
      std::string s;
      read_key(g, "audit_log", s, "judge");
      cfg.judge.audit_log = resolve(base_dir, s);
    }
    if (cfg.judge.mode == JudgeMode::Remote && cfg.judge.remote.endpoint.empty())
      config_error("judge.mode 'remote' requires judge.endpoint");
  }
  return cfg;
}

PipelineConfig load_config(const fs::path& path) {
  std::string text;
  try {
    text = detail::read_file(path);
  } catch (const Error& e) {
    config_error(e.what());
  }
  return parse_config(text, path.parent_path());
}

std::string encode_config(const PipelineConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["jobs"] = cfg.jobs;
  j["status"] = {{"alpha", cfg.status.alpha}, {"beta", cfg.status.beta}, {"tau", cfg.status.tau},
                 {"normalize_sad", cfg.status.normalize_sad}};
  const FusionConfig& f = cfg.fusion;
  j["fusion"] = {{"d_me", f.d_me}, {"d_complex", f.d_complex}, {"d_eye", f.d_eye}, {"d_head", f.d_head},
                 {"d_llm", f.d_llm}, {"num_heads", f.num_heads}, {"mlp_hidden", f.mlp_hidden},
                 {"layernorm_epsilon", f.layernorm_epsilon}, {"seed", f.seed},
                 {"input_dims", {{"head", f.input.head}, {"eye", f.input.eye}, {"emo", f.input.emo},
                                 {"lip", f.input.lip}}}};
  j["paths"] = {{"input_dir", cfg.paths.input_dir.string()},
                {"annotation_file", cfg.paths.annotation_file.string()},
                {"output_dir", cfg.paths.output_dir.string()},
                {"checkpoint", cfg.paths.checkpoint ? json(cfg.paths.checkpoint->string()) : json(nullptr)}};
  const auto& r = cfg.judge.remote;
  j["judge"] = {{"mode", cfg.judge.mode == JudgeMode::Mock ? "mock" : "remote"},
                {"endpoint", r.endpoint},
                {"api_key_env", r.api_key_env},
                {"concurrency", cfg.judge.concurrency},
                {"timeout_ms", r.timeout.count()},
                {"max_attempts", r.max_attempts},
                {"backoff_initial_ms", r.backoff_initial.count()},
                {"backoff_factor", r.backoff_factor},
                {"backoff_max_ms", r.backoff_max.count()}};
  if (!cfg.judge.audit_log.empty()) j["judge"]["audit_log"] = cfg.judge.audit_log.string();
  return j.dump(2) + "\n";
}

// --- prompt package ------------------------------------------------------------

std::size_t count_placeholders(std::string_view text, std::string_view token) {
  if (token.empty()) return 0;
  std::size_t n = 0;
  for (auto pos = text.find(token); pos != std::string_view::npos; pos = text.find(token, pos + token.size()))
    ++n;
  return n;
}

PromptPackage make_prompt_package(std::string clip_id, nn::Vector v_proj) {
  PromptPackage p;
  p.clip_id = std::move(clip_id);
  p.instruction = "Input Data: " + std::string(kExprToken) + "\nInstruction: " + std::string(kInstruction);
  p.v_proj = std::move(v_proj);
  return p;
}

// --- batch helpers ---------------------------------------------------------------

std::size_t BatchResult::failures() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(clips.begin(), clips.end(), [](const ClipOutcome& c) { return !c.ok; }));
}

int BatchResult::exit_code() const noexcept { return failures() == 0 ? 0 : 1; }

namespace {

// Runs fn(i) for i in [0, n) on up to `jobs` threads. fn must not throw.
template <class F>
void parallel_for(std::size_t n, std::size_t jobs, F&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : workers) t.join();
}

fs::path clip_path(const PipelineConfig& cfg, const std::string& id) {
  return cfg.paths.input_dir / (id + ".mindfs");
}
fs::path purified_path(const PipelineConfig& cfg, const std::string& id) {
  return cfg.paths.output_dir / "purified" / (id + ".mindfs");
}
fs::path encoded_path(const PipelineConfig& cfg, const std::string& id) {
  return cfg.paths.output_dir / "encoded" / (id + ".json");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
}

std::map<std::string, Annotation> annotation_index(const PipelineConfig& cfg) {
  std::map<std::string, Annotation> index;
  if (!fs::exists(cfg.paths.annotation_file)) return index;
  for (auto& a : read_annotations(cfg.paths.annotation_file)) {
    std::string id = a.clip_id;
    index.emplace(std::move(id), std::move(a));
  }
  return index;
}

std::string synthetic_analysis(const Annotation& ann, nn::Rng& rng) {
  static constexpr std::array<std::string_view, 3> kReasoning = {
      " This suggests the speaker is guarded about the topic.",
      " The tension reflects discomfort because the question is personal.",
      " Therefore the smile reads as social rather than felt.",
  };
  static constexpr std::array<std::string_view, 5> kRegions = {
      " The brow tightens slightly.", " The eyes narrow.", " The lips press together.",
      " The jaw sets.", " The cheeks lift.",
  };
  std::string text;
  if (rng.uniform01() < 0.8) {
    text += "The person appears to show " + ann.macro_label + " throughout the clip.";
  } else {
    text += "The person appears composed.";
  }
  const double r = rng.uniform01();
  if (r < 0.6) {
    text += " A fleeting hint of " + ann.micro_label + " crosses the face.";
  } else if (r < 0.8) {
    text += " There may be some " + ann.micro_label + ".";
  }
  const std::size_t reasons = rng.next_u64() % (kReasoning.size() + 1);
  for (std::size_t i = 0; i < reasons; ++i) text += kReasoning[i];
  const std::size_t regions = 1 + rng.next_u64() % kRegions.size();
  for (std::size_t i = 0; i < regions; ++i) text += kRegions[i];
  return text;
}

}  // namespace

std::vector<std::string> discover_clips(const PipelineConfig& cfg) {
  std::vector<std::string> ids;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(cfg.paths.input_dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".mindfs")
      ids.push_back(entry.path().stem().string());
  }
  if (ec) throw Error(Errc::ConfigError, "cannot list " + cfg.paths.input_dir.string() + ": " + ec.message());
  std::sort(ids.begin(), ids.end());
  return ids;
}

// --- gen-synthetic ---------------------------------------------------------------

void generate_dataset(const PipelineConfig& cfg, const GenerateOptions& opts) {
  std::vector<SyntheticMode> cycle;
  if (opts.mode == "mixed") {
    cycle = {SyntheticMode::Articulating, SyntheticMode::Static, SyntheticMode::HeldExpression};
  } else if (auto m = parse_synthetic_mode(opts.mode)) {
    cycle = {*m};
  } else {
    throw Error(Errc::ConfigError, "unknown synthetic mode '" + opts.mode + "'");
  }
  ensure_dir(cfg.paths.input_dir);
  if (cfg.paths.annotation_file.has_parent_path()) ensure_dir(cfg.paths.annotation_file.parent_path());

  std::vector<Annotation> annotations(opts.count);
  std::vector<std::string> analyses(opts.count);
  std::vector<std::string> ids(opts.count);
  std::vector<std::string> errors(opts.count);
  parallel_for(opts.count, cfg.jobs, [&](std::size_t i) {
    try {
      char name[32];
      std::snprintf(name, sizeof name, "clip_%04zu", i);
      SyntheticSpec spec = opts.base;
      spec.mode = cycle[i % cycle.size()];
      spec.seed = nn::derive_seed(cfg.seed, i);
      spec.clip_id = name;
      auto [dyn, ann] = generate_synthetic(spec);
      write_container(dyn, clip_path(cfg, name));
      nn::Rng text_rng(nn::derive_seed(spec.seed, 0xA11A));
      analyses[i] = synthetic_analysis(ann, text_rng);
      annotations[i] = std::move(ann);
      ids[i] = name;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (const auto& e : errors)
    if (!e.empty()) throw Error(Errc::IoFailure, "gen-synthetic: " + e);

  write_annotations(annotations, cfg.paths.annotation_file);
  json doc = {{"model", "synthetic-candidate"}, {"analyses", json::object()}};
  for (std::size_t i = 0; i < opts.count; ++i) doc["analyses"][ids[i]] = analyses[i];
  detail::write_file_atomic(cfg.paths.input_dir / "analyses.json", doc.dump(2) + "\n");
}

// --- disentangle -----------------------------------------------------------------

BatchResult run_disentangle(const PipelineConfig& cfg, const std::vector<std::string>& clip_ids) {
  validate(cfg.status);
  ensure_dir(cfg.paths.output_dir / "purified");

  std::vector<ClipOutcome> outcomes(clip_ids.size());
  std::vector<json> records(clip_ids.size());
  parallel_for(clip_ids.size(), cfg.jobs, [&](std::size_t i) {
    const std::string& id = clip_ids[i];
    outcomes[i].clip_id = id;
    try {
      FacialDynamics dyn = read_container(clip_path(cfg, id));
      const StatusVerdict v = judge(dyn.lip, cfg.status);
      dyn.lip = purify(dyn.lip, v);
      write_container(dyn, purified_path(cfg, id));
      records[i] = {{"clip_id", id}, {"status", "ok"}, {"v_var", v.v_var}, {"v_sad", v.v_sad},
                    {"score", v.score}, {"c", v.c()}};
      outcomes[i].ok = true;
    } catch (const std::exception& e) {
      outcomes[i].error = e.what();
      records[i] = {{"clip_id", id}, {"status", "failed"}, {"error", e.what()}};
    }
  });

  BatchResult result{std::move(outcomes)};
  json doc = {{"clips", records}, {"failures", result.failures()},
              {"config", {{"alpha", cfg.status.alpha}, {"beta", cfg.status.beta}, {"tau", cfg.status.tau},
                          {"normalize_sad", cfg.status.normalize_sad}}}};
  detail::write_file_atomic(cfg.paths.output_dir / "verdicts.json", doc.dump(2) + "\n");
  return result;
}

// --- encode ----------------------------------------------------------------------

FusionWeights load_weights(const PipelineConfig& cfg) {
  if (cfg.paths.checkpoint) return load_fusion(cfg.fusion, *cfg.paths.checkpoint);
  return init_fusion(cfg.fusion);
}

BatchResult run_encode(const PipelineConfig& cfg, const std::vector<std::string>& clip_ids) {
  const FusionWeights weights = load_weights(cfg);
  const auto annotations = annotation_index(cfg);
  ensure_dir(cfg.paths.output_dir / "encoded");

  std::vector<ClipOutcome> outcomes(clip_ids.size());
  parallel_for(clip_ids.size(), cfg.jobs, [&](std::size_t i) {
    const std::string& id = clip_ids[i];
    outcomes[i].clip_id = id;
    try {
      const FacialDynamics dyn = read_container(clip_path(cfg, id));
      const fs::path pur = purified_path(cfg, id);
      if (!fs::exists(pur)) throw Error(Errc::IoFailure, "no purified stream for " + id + "; run disentangle first");
      const FacialDynamics purified = read_container(pur);

      std::vector<nn::Matrix> segments;
      if (auto it = annotations.find(id); it != annotations.end()) {
        validate(it->second, dyn.frames());
        for (const auto& seg : it->second.micro_segments)
          segments.push_back(extract_segment(dyn, purified.lip, seg));
      }
      const MicroFeature f_me = encode_micro(segments, weights.micro);
      MindVector mv = fuse(dyn, purified.lip, f_me, weights);
      const PromptPackage pkg = make_prompt_package(id, mv.v_proj);

      json doc = {{"clip_id", id},
                  {"micro_segments", segments.size()},
                  {"v_mind", mv.v_mind},
                  {"prompt_package", {{"clip_id", pkg.clip_id},
                                      {"instruction", pkg.instruction},
                                      {"placeholder", pkg.placeholder},
                                      {"v_proj", pkg.v_proj}}}};
      detail::write_file_atomic(encoded_path(cfg, id), doc.dump() + "\n");
      outcomes[i].ok = true;
    } catch (const std::exception& e) {
      outcomes[i].error = e.what();
    }
  });
  return BatchResult{std::move(outcomes)};
}

// --- score -----------------------------------------------------------------------

namespace {

struct ScoreRecord {
  std::string clip_id;
  std::optional<prism::JudgeResponse> response;
  Errc error_code = Errc::MalformedReply;
  std::string error;
  std::string raw_reply;
};

std::map<std::string, std::string> read_analyses(const fs::path& path, std::string* model) {
  json j;
  try {
    j = json::parse(detail::read_file(path));
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, std::string("analyses document: ") + e.what());
  }
  const json* table = &j;
  if (j.is_object() && j.contains("analyses")) {
    table = &j["analyses"];
    if (model && j.contains("model") && j["model"].is_string()) *model = j["model"].get<std::string>();
  }
  if (!table->is_object()) throw Error(Errc::ConfigError, "analyses must map clip_id to text");
  std::map<std::string, std::string> out;
  for (const auto& [id, text] : table->items()) {
    if (!text.is_string()) throw Error(Errc::ConfigError, "analysis for " + id + " is not text");
    out.emplace(id, text.get<std::string>());
  }
  return out;
}

prism::ModelRow row_from_records(const std::string& name, const std::vector<prism::PrismScore>& scores,
                                 std::size_t excluded) {
  prism::ModelRow row;
  row.name = name;
  row.scored = scores.size();
  row.excluded = excluded;
  if (!scores.empty()) row.means = prism::aggregate(scores);
  return row;
}

json clamps_to_json(const std::vector<prism::ClampEvent>& clamps) {
  json arr = json::array();
  for (const auto& c : clamps)
    arr.push_back({{"dimension", prism::to_string(c.dimension)}, {"raw", c.raw}, {"clamped", c.clamped}});
  return arr;
}

}  // namespace

BatchResult run_score(const PipelineConfig& cfg, const ScoreOptions& opts, const prism::JudgeFn& judge_override) {
  std::string model = opts.model;
  const auto analyses = read_analyses(opts.analyses, opts.model == "candidate" ? &model : nullptr);
  if (analyses.empty()) throw Error(Errc::EmptyInput, "analyses document is empty");
  const auto annotations = annotation_index(cfg);
  ensure_dir(cfg.paths.output_dir);

  std::unique_ptr<prism::AuditLog> audit;
  prism::JudgeFn judge_fn = judge_override;
  std::size_t concurrency = cfg.jobs;
  if (!judge_fn) {
    if (cfg.judge.mode == JudgeMode::Mock) {
      judge_fn = prism::judge_mock;
    } else {
      const fs::path log = cfg.judge.audit_log.empty() ? cfg.paths.output_dir / "judge_audit.jsonl"
                                                       : cfg.judge.audit_log;
      audit = std::make_unique<prism::AuditLog>(log);
      judge_fn = [&cfg, a = audit.get()](const prism::JudgeRequest& r) {
        return prism::judge_remote(r, cfg.judge.remote, a);
      };
      concurrency = cfg.judge.concurrency;
    }
  } else {
    concurrency = cfg.judge.concurrency;
  }

  std::vector<std::pair<std::string, std::string>> items(analyses.begin(), analyses.end());
  std::vector<ScoreRecord> records(items.size());
  parallel_for(items.size(), concurrency, [&](std::size_t i) {
    ScoreRecord& rec = records[i];
    rec.clip_id = items[i].first;
    try {
      prism::JudgeRequest req;
      req.clip_id = rec.clip_id;
      req.generated_analysis = items[i].second;
      auto it = annotations.find(rec.clip_id);
      if (it == annotations.end())
        throw Error(Errc::MissingAnnotation, "clip " + rec.clip_id + " has no annotation");
      req.annotation = it->second;
      rec.response = judge_fn(req);
    } catch (const prism::JudgeError& e) {
      rec.error_code = e.code();
      rec.error = e.what();
      rec.raw_reply = e.raw_reply();
    } catch (const Error& e) {
      rec.error_code = e.code();
      rec.error = e.what();
    } catch (const std::exception& e) {
      rec.error_code = Errc::TransportFailure;
      rec.error = e.what();
    }
  });

  std::vector<prism::PrismScore> scores;
  std::map<std::string, std::size_t> error_counts;
  std::size_t clamp_count = 0;
  json rows = json::array();
  BatchResult result;
  for (const auto& rec : records) {
    ClipOutcome outcome{rec.clip_id, rec.response.has_value(), rec.error};
    result.clips.push_back(outcome);
    if (rec.response) {
      const auto& r = *rec.response;
      scores.push_back(r.score);
      clamp_count += r.clamps.size();
      rows.push_back({{"clip_id", rec.clip_id}, {"status", "ok"},       {"mac", r.score.mac()},
                      {"mic", r.score.mic()},   {"pird", r.score.pird()}, {"dcr", r.score.dcr()},
                      {"total", r.score.total()}, {"clamps", clamps_to_json(r.clamps)},
                      {"judge_id", r.judge_id}, {"rationale", r.rationale}});
    } else {
      ++error_counts[std::string(to_string(rec.error_code))];
      json row = {{"clip_id", rec.clip_id}, {"status", "excluded"},
                  {"error_class", to_string(rec.error_code)}, {"error", rec.error}};
      if (!rec.raw_reply.empty()) row["raw_reply"] = rec.raw_reply;
      rows.push_back(std::move(row));
    }
  }

  json scores_doc = {{"model", model},
                     {"judge", cfg.judge.mode == JudgeMode::Mock && !judge_override ? "mock" : "remote"},
                     {"records", rows},
                     {"scored", scores.size()},
                     {"excluded", result.failures()},
                     {"clamped_dimensions", clamp_count},
                     {"error_counts", error_counts}};
  detail::write_file_atomic(cfg.paths.output_dir / "scores.json", scores_doc.dump(2) + "\n");

  std::vector<prism::ModelRow> models;
  std::optional<std::string> baseline;
  if (opts.baseline) {
    auto doc = prism::parse_model_means(detail::read_file(*opts.baseline));
    baseline = doc.baseline ? doc.baseline
                            : (doc.models.empty() ? std::nullopt : std::optional(doc.models.front().name));
    models = std::move(doc.models);
  }
  std::vector<std::string> notes;
  if (scores.empty()) {
    notes.push_back(model + ": no clips scored (" + std::to_string(result.failures()) + " excluded)");
  } else {
    models.push_back(row_from_records(model, scores, result.failures()));
  }
  if (result.failures() > 0) {
    std::string note = model + ": excluded clips";
    for (const auto& c : result.clips)
      if (!c.ok) note += " " + c.clip_id;
    notes.push_back(note);
  }
  prism::BenchmarkReport report = prism::build_report(std::move(models), baseline);
  report.notes = std::move(notes);
  write_report(report, cfg.paths.output_dir);
  return result;
}

prism::BenchmarkReport build_report_from_files(const std::vector<fs::path>& inputs,
                                               std::optional<std::string> baseline) {
  if (inputs.empty()) throw Error(Errc::EmptyInput, "no score files given");
  std::vector<prism::ModelRow> models;
  std::vector<std::string> notes;
  std::optional<std::string> doc_baseline;
  for (const auto& path : inputs) {
    const std::string text = detail::read_file(path);
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw Error(Errc::MalformedHeader, path.string() + ": " + e.what());
    }
    if (j.contains("records")) {
      std::vector<prism::PrismScore> scores;
      std::size_t excluded = 0;
      for (const auto& r : j["records"]) {
        if (r.value("status", "") != "ok") {
          ++excluded;
          continue;
        }
        prism::RawScores raw{r.at("mac").get<double>(), r.at("mic").get<double>(),
                             r.at("pird").get<double>(), r.at("dcr").get<double>()};
        scores.push_back(prism::ingest(raw));
      }
      const std::string name = j.value("model", path.stem().string());
      if (scores.empty()) notes.push_back(name + ": no clips scored (" + std::to_string(excluded) + " excluded)");
      else models.push_back(row_from_records(name, scores, excluded));
    } else {
      auto doc = prism::parse_model_means(text);
      if (!doc_baseline) doc_baseline = doc.baseline;
      for (auto& m : doc.models) models.push_back(std::move(m));
    }
  }
  if (models.empty()) throw Error(Errc::EmptyInput, "no scored models in the given files");
  prism::BenchmarkReport report = prism::build_report(std::move(models), baseline ? baseline : doc_baseline);
  report.notes = std::move(notes);
  return report;
}

void write_report(const prism::BenchmarkReport& report, const fs::path& out_dir) {
  ensure_dir(out_dir);
  detail::write_file_atomic(out_dir / "report.txt", prism::render_text(report));
  detail::write_file_atomic(out_dir / "report.json", prism::render_json(report));
}

// --- calibration -----------------------------------------------------------------

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(Errc::EmptyInput, "percentile of no values");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

CalibrationResult calibrate_tau(const StatusConfig& status, const SyntheticSpec& base, std::size_t seeds) {
  if (seeds == 0) throw Error(Errc::EmptyInput, "calibration needs at least one seed");
  StatusConfig probe = status;
  probe.tau = 0.0;
  std::vector<double> static_scores(seeds), artic_scores(seeds);
  for (std::size_t i = 0; i < seeds; ++i) {
    SyntheticSpec s = base;
    s.mode = SyntheticMode::Static;
    s.seed = nn::derive_seed(base.seed, 2 * i);
    static_scores[i] = judge(generate_synthetic(s).first.lip, probe).score;
    s.mode = SyntheticMode::Articulating;
    s.seed = nn::derive_seed(base.seed, 2 * i + 1);
    artic_scores[i] = judge(generate_synthetic(s).first.lip, probe).score;
  }
  CalibrationResult r;
  r.seeds = seeds;
  r.static_p95 = percentile(static_scores, 0.95);
  r.articulating_p05 = percentile(artic_scores, 0.05);
  r.tau = 0.5 * (r.static_p95 + r.articulating_p05);
  return r;
}

}  // namespace mind::pipeline
