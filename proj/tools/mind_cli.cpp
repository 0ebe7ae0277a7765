// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

// mind: facial-dynamics disentanglement, fusion encoding and PRISM scoring.
//
// Exit status: 0 all clips succeeded, 1 some clips failed, 2 configuration
// or input error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mind/error.hpp"
#include "mind/pipeline.hpp"

namespace {

using mind::pipeline::PipelineConfig;

constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> jobs;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "Pipeline config file (JSON)");
  cmd->add_option("--seed", f.seed, "Master seed (overrides config)");
  cmd->add_option("--out", f.out, "Output directory (overrides config)");
  cmd->add_option("--jobs", f.jobs, "Worker threads (overrides config)")->check(CLI::PositiveNumber);
}

PipelineConfig resolve_config(const CommonFlags& f) {
  PipelineConfig cfg = f.config.empty() ? mind::pipeline::parse_config("{}") : mind::pipeline::load_config(f.config);
  if (f.seed) {
    cfg.seed = *f.seed;
    cfg.fusion.seed = *f.seed;
  }
  if (!f.out.empty()) cfg.paths.output_dir = f.out;
  if (f.jobs) cfg.jobs = *f.jobs;
  return cfg;
}

void print_failures(const mind::pipeline::BatchResult& r, const char* stage) {
  for (const auto& c : r.clips)
    if (!c.ok) std::fprintf(stderr, "%s: clip %s failed: %s\n", stage, c.clip_id.c_str(), c.error.c_str());
  std::fprintf(stderr, "%s: %zu clips, %zu failed\n", stage, r.clips.size(), r.failures());
}

std::vector<std::string> clip_list(const PipelineConfig& cfg, const std::vector<std::string>& requested) {
  return requested.empty() ? mind::pipeline::discover_clips(cfg) : requested;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MIND facial-dynamics pipeline and PRISM evaluation"};
  app.require_subcommand(1);

  // gen-synthetic
  CommonFlags gen_flags;
  mind::pipeline::GenerateOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-synthetic", "Write a synthetic clip set, annotations and candidate analyses");
  add_common(gen_cmd, gen_flags);
  gen_cmd->add_option("--count", gen.count, "Number of clips")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--mode", gen.mode, "articulating | static | held | mixed")
      ->check(CLI::IsMember({"articulating", "static", "held", "mixed"}));
  gen_cmd->add_option("--frames", gen.base.frames, "Frames per clip")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--noise", gen.base.noise_scale, "Noise scale");
  gen_cmd->add_option("--amplitude", gen.base.oscillation_amplitude, "Lip oscillation amplitude");
  gen_cmd->add_option("--period", gen.base.oscillation_period_frames, "Lip oscillation period (frames)");

  // disentangle
  CommonFlags dis_flags;
  std::vector<std::string> dis_clips;
  auto* dis_cmd = app.add_subcommand("disentangle", "Status judgment and lip purification per clip");
  add_common(dis_cmd, dis_flags);
  dis_cmd->add_option("--clips", dis_clips, "Clip ids (default: every clip in input_dir)")->delimiter(',');

  // encode
  CommonFlags enc_flags;
  std::vector<std::string> enc_clips;
  std::string save_checkpoint;
  auto* enc_cmd = app.add_subcommand("encode", "Micro + multi-level encoding and prompt packages");
  add_common(enc_cmd, enc_flags);
  enc_cmd->add_option("--clips", enc_clips, "Clip ids (default: every clip in input_dir)")->delimiter(',');
  enc_cmd->add_option("--save-checkpoint", save_checkpoint, "Also write the fusion weights to this file");

  // score
  CommonFlags score_flags;
  mind::pipeline::ScoreOptions score;
  std::string analyses;
  std::string baseline_file;
  auto* score_cmd = app.add_subcommand("score", "Judge analyses with PRISM and write scores + report");
  add_common(score_cmd, score_flags);
  score_cmd->add_option("--analyses", analyses, "clip_id -> analysis text document (default: <input_dir>/analyses.json)");
  score_cmd->add_option("--baseline", baseline_file, "Model-means document to compare against");
  score_cmd->add_option("--model", score.model, "Model name for the report");

  // report
  CommonFlags rep_flags;
  std::vector<std::string> rep_inputs;
  std::string rep_baseline;
  auto* rep_cmd = app.add_subcommand("report", "Render a benchmark report from score files");
  add_common(rep_cmd, rep_flags);
  rep_cmd->add_option("--scores", rep_inputs, "scores.json or model-means documents")->required();
  rep_cmd->add_option("--baseline", rep_baseline, "Baseline model name");

  // calibrate-tau
  CommonFlags cal_flags;
  std::size_t cal_seeds = 1000;
  mind::SyntheticSpec cal_spec;
  std::string write_config;
  auto* cal_cmd = app.add_subcommand("calibrate-tau", "Calibrate the status-judgment threshold on synthetic clips");
  add_common(cal_cmd, cal_flags);
  cal_cmd->add_option("--seeds", cal_seeds, "Clips per class")->check(CLI::PositiveNumber);
  cal_cmd->add_option("--frames", cal_spec.frames, "Frames per clip")->check(CLI::PositiveNumber);
  cal_cmd->add_option("--write-config", write_config, "Write the config with the calibrated tau here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen_cmd) {
      PipelineConfig cfg = resolve_config(gen_flags);
      if (!gen_flags.out.empty()) {
        cfg.paths.input_dir = gen_flags.out;
        cfg.paths.annotation_file = std::filesystem::path(gen_flags.out) / "annotations.json";
      }
      gen.base.dims = cfg.fusion.input;
      mind::pipeline::generate_dataset(cfg, gen);
      std::fprintf(stderr, "gen-synthetic: wrote %zu clips to %s\n", gen.count, cfg.paths.input_dir.c_str());
      return 0;
    }
    if (*dis_cmd) {
      const PipelineConfig cfg = resolve_config(dis_flags);
      auto r = mind::pipeline::run_disentangle(cfg, clip_list(cfg, dis_clips));
      print_failures(r, "disentangle");
      return r.exit_code();
    }
    if (*enc_cmd) {
      const PipelineConfig cfg = resolve_config(enc_flags);
      if (!save_checkpoint.empty()) mind::save_fusion(mind::pipeline::load_weights(cfg), save_checkpoint);
      auto r = mind::pipeline::run_encode(cfg, clip_list(cfg, enc_clips));
      print_failures(r, "encode");
      return r.exit_code();
    }
    if (*score_cmd) {
      const PipelineConfig cfg = resolve_config(score_flags);
      score.analyses = analyses.empty() ? cfg.paths.input_dir / "analyses.json" : std::filesystem::path(analyses);
      if (!baseline_file.empty()) score.baseline = baseline_file;
      auto r = mind::pipeline::run_score(cfg, score);
      print_failures(r, "score");
      return r.exit_code();
    }
    if (*rep_cmd) {
      const PipelineConfig cfg = resolve_config(rep_flags);
      std::vector<std::filesystem::path> inputs(rep_inputs.begin(), rep_inputs.end());
      auto report = mind::pipeline::build_report_from_files(
          inputs, rep_baseline.empty() ? std::nullopt : std::optional(rep_baseline));
      if (!rep_flags.out.empty()) mind::pipeline::write_report(report, cfg.paths.output_dir);
      std::cout << mind::prism::render_text(report);
      return 0;
    }
    if (*cal_cmd) {
      PipelineConfig cfg = resolve_config(cal_flags);
      cal_spec.dims = cfg.fusion.input;
      cal_spec.seed = cfg.seed;
      const auto r = mind::pipeline::calibrate_tau(cfg.status, cal_spec, cal_seeds);
      std::printf("{\"seeds\": %zu, \"static_p95\": %.17g, \"articulating_p05\": %.17g, \"tau\": %.17g}\n",
                  r.seeds, r.static_p95, r.articulating_p05, r.tau);
      if (!write_config.empty()) {
        cfg.status.tau = r.tau;
        std::FILE* f = std::fopen(write_config.c_str(), "w");
        if (!f) throw mind::Error(mind::Errc::IoFailure, "cannot write " + write_config);
        const std::string text = mind::pipeline::encode_config(cfg);
        std::fwrite(text.data(), 1, text.size(), f);
        std::fclose(f);
      }
      return 0;
    }
  } catch (const mind::Error& e) {
    std::fprintf(stderr, "mind: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "mind: %s\n", e.what());
    return kExitConfig;
  }
  return kExitPartial;
}
