// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mind/feature_streams.hpp"

namespace mind {

// Threshold shipped with the default config. Produced by `mind calibrate-tau`
// over 1000 seeds per class at the default synthetic shape (T=64, D_lip=512):
// midpoint between the 95th percentile of static-clip scores and the 5th
// percentile of articulating-clip scores.
inline constexpr double kDefaultTau = 167.60751915750384;

struct StatusConfig {
  double alpha = 1.0;
  double beta = 0.1;
  double tau = kDefaultTau;
  // Divide the adjacent-difference sum by max(T-1, 1).
  bool normalize_sad = false;
};

// Throws InvalidSpec if a weight is negative or non-finite, both weights are
// zero, or tau is non-finite.
void validate(const StatusConfig& cfg);

struct LipStatistics {
  double v_var = 0.0;  // (1/T) Σ_t ‖f_t − μ‖²
  double v_sad = 0.0;  // Σ_{t≥2} ‖f_t − f_{t−1}‖
};

struct StatusVerdict {
  double v_var = 0.0;
  double v_sad = 0.0;
  double score = 0.0;
  bool articulating = false;  // c = 1

  int c() const noexcept { return articulating ? 1 : 0; }
};

// Throws InvalidSpec if the stream is not a lip stream.
LipStatistics compute_statistics(const FeatureStream& lip);

StatusVerdict judge(const FeatureStream& lip, const StatusConfig& cfg);

// Gated suppression (1 − c)·E_lip: the input when c = 0, zeros when c = 1.
FeatureStream purify(const FeatureStream& lip, const StatusVerdict& verdict);

}  // namespace mind
