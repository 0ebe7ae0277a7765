// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "mind/micro_encoder.hpp"
#include "mind/multilevel_encoder.hpp"
#include "mind/nn/layers.hpp"
#include "mind/prism/judge.hpp"
#include "mind/status_judgment.hpp"

namespace {

using namespace mind;

void BM_LipStatistics(benchmark::State& state) {
  SyntheticSpec spec;
  spec.frames = static_cast<std::size_t>(state.range(0));
  const auto dyn = generate_synthetic(spec).first;
  for (auto _ : state) benchmark::DoNotOptimize(compute_statistics(dyn.lip));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LipStatistics)->Arg(16)->Arg(64)->Arg(256);

void BM_AttentionForward(benchmark::State& state) {
  const auto T = static_cast<std::size_t>(state.range(0));
  nn::Rng rng(1);
  const auto p = nn::init_mha(256, 4, rng);
  nn::Matrix x(T, 256);
  for (double& v : x.data()) v = rng.uniform(-1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(nn::mha_forward(p, x));
}
BENCHMARK(BM_AttentionForward)->Arg(16)->Arg(64);

void BM_AttentionBackward(benchmark::State& state) {
  const auto T = static_cast<std::size_t>(state.range(0));
  nn::Rng rng(2);
  const auto p = nn::init_mha(256, 4, rng);
  nn::Matrix x(T, 256), g(T, 256);
  for (double& v : x.data()) v = rng.uniform(-1.0, 1.0);
  for (double& v : g.data()) v = rng.uniform(-1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(nn::mha_backward(p, x, g));
}
BENCHMARK(BM_AttentionBackward)->Arg(16)->Arg(64);

void BM_FuseClip(benchmark::State& state) {
  const FusionConfig cfg;
  const auto w = init_fusion(cfg);
  SyntheticSpec spec;
  spec.mode = SyntheticMode::HeldExpression;
  const auto [dyn, ann] = generate_synthetic(spec);
  const auto lip = purify(dyn.lip, judge(dyn.lip, {}));
  for (auto _ : state) {
    std::vector<nn::Matrix> segs;
    for (const auto& s : ann.micro_segments) segs.push_back(extract_segment(dyn, lip, s));
    const auto f_me = encode_micro(segs, w.micro);
    benchmark::DoNotOptimize(fuse(dyn, lip, f_me, w));
  }
}
BENCHMARK(BM_FuseClip)->Unit(benchmark::kMillisecond);

void BM_MockJudge(benchmark::State& state) {
  SyntheticSpec spec;
  const auto ann = generate_synthetic(spec).second;
  const prism::JudgeRequest req{ann.clip_id, *ann.reference_analysis, ann};
  for (auto _ : state) benchmark::DoNotOptimize(prism::judge_mock(req));
}
BENCHMARK(BM_MockJudge);

}  // namespace

BENCHMARK_MAIN();
