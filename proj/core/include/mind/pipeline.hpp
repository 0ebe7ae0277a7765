// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

// Batch orchestration behind the `mind` command-line tool.
//
// Output directory layout:
//   verdicts.json              status-judgment record per clip
//   purified/<clip>.mindfs     clip with the gated lip stream
//   encoded/<clip>.json        V_MIND and the prompt package
//   scores.json                per-clip judge results
//   report.txt, report.json    benchmark report

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mind/feature_streams.hpp"
#include "mind/multilevel_encoder.hpp"
#include "mind/nn/matrix.hpp"
#include "mind/prism/judge.hpp"
#include "mind/prism/report.hpp"
#include "mind/status_judgment.hpp"

namespace mind::pipeline {

enum class JudgeMode { Mock, Remote };

struct JudgeSettings {
  JudgeMode mode = JudgeMode::Mock;
  prism::RemoteJudgeConfig remote;
  std::size_t concurrency = 4;
  std::filesystem::path audit_log;  // empty: <output_dir>/judge_audit.jsonl
};

struct Paths {
  std::filesystem::path input_dir = "clips";
  std::filesystem::path annotation_file = "annotations.json";
  std::filesystem::path output_dir = "out";
  std::optional<std::filesystem::path> checkpoint;
};

struct PipelineConfig {
  StatusConfig status;
  FusionConfig fusion;
  Paths paths;
  JudgeSettings judge;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

// Structured-text config (JSON). Keys mirror PipelineConfig; missing keys keep
// their defaults, unknown keys throw ConfigError. Relative paths resolve
// against the config file's directory. fusion.seed defaults to seed.
PipelineConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);
std::string encode_config(const PipelineConfig& cfg);

// --- prompt package ----------------------------------------------------------

inline constexpr std::string_view kExprToken = "<expr>";
inline constexpr std::string_view kInstruction =
    "You are an expert in psychology and micro-expression analysis. Please provide a detailed "
    "analysis of the person's facial expressions, emotional state, and inner psychology based on "
    "this expression feature.";

struct PromptPackage {
  std::string clip_id;
  std::string instruction;  // contains kExprToken exactly once
  std::string placeholder = std::string(kExprToken);
  nn::Vector v_proj;
};

PromptPackage make_prompt_package(std::string clip_id, nn::Vector v_proj);
std::size_t count_placeholders(std::string_view text, std::string_view token = kExprToken);

// --- batch operations ----------------------------------------------------------

struct ClipOutcome {
  std::string clip_id;
  bool ok = false;
  std::string error;
};

struct BatchResult {
  std::vector<ClipOutcome> clips;

  std::size_t failures() const noexcept;
  // 0 when every clip succeeded, 1 otherwise.
  int exit_code() const noexcept;
};

// Clip ids for every <id>.mindfs in input_dir, sorted.
std::vector<std::string> discover_clips(const PipelineConfig& cfg);

struct GenerateOptions {
  std::size_t count = 8;
  // "articulating", "static", "held", or "mixed" (cycles all three).
  std::string mode = "mixed";
  SyntheticSpec base;
};

// Writes <input_dir>/clip_NNNN.mindfs, the annotation document, and a
// synthetic candidate-analyses document (<input_dir>/analyses.json) that
// stands in for language-model output.
void generate_dataset(const PipelineConfig& cfg, const GenerateOptions& opts);

BatchResult run_disentangle(const PipelineConfig& cfg, const std::vector<std::string>& clip_ids);

// Throws MissingCheckpoint if a configured checkpoint does not exist.
FusionWeights load_weights(const PipelineConfig& cfg);
BatchResult run_encode(const PipelineConfig& cfg, const std::vector<std::string>& clip_ids);

struct ScoreOptions {
  std::filesystem::path analyses;
  std::optional<std::filesystem::path> baseline;  // model-means document
  std::string model = "candidate";
};

// Throws EmptyInput for an empty analyses document.
BatchResult run_score(const PipelineConfig& cfg, const ScoreOptions& opts,
                      const prism::JudgeFn& judge_override = {});

// Combines model-means documents and/or scores.json outputs into one report.
prism::BenchmarkReport build_report_from_files(const std::vector<std::filesystem::path>& inputs,
                                               std::optional<std::string> baseline);
void write_report(const prism::BenchmarkReport& report, const std::filesystem::path& out_dir);

// --- calibration -------------------------------------------------------------

struct CalibrationResult {
  double tau = 0.0;
  double static_p95 = 0.0;
  double articulating_p05 = 0.0;
  std::size_t seeds = 0;
};

// Linear-interpolated percentile of unsorted values, q in [0, 1].
double percentile(std::vector<double> values, double q);

// Midpoint between the 95th percentile of static scores and the 5th
// percentile of articulating scores, over `seeds` clips of each class
// generated from `base` with derive_seed(base.seed, i).
CalibrationResult calibrate_tau(const StatusConfig& status, const SyntheticSpec& base, std::size_t seeds);

}  // namespace mind::pipeline
