// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mind/status_judgment.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mind/error.hpp"

namespace mind {

void validate(const StatusConfig& cfg) {
  if (!(std::isfinite(cfg.alpha) && cfg.alpha >= 0.0) || !(std::isfinite(cfg.beta) && cfg.beta >= 0.0))
    throw Error(Errc::InvalidSpec, "alpha and beta must be finite and >= 0");
  if (cfg.alpha == 0.0 && cfg.beta == 0.0)
    throw Error(Errc::InvalidSpec, "alpha and beta cannot both be zero");
  if (!std::isfinite(cfg.tau)) throw Error(Errc::InvalidSpec, "tau must be finite");
}

LipStatistics compute_statistics(const FeatureStream& lip) {
  if (lip.kind() != StreamKind::Lip)
    throw Error(Errc::InvalidSpec, "status judgment runs on the lip stream only");

  const std::size_t T = lip.frames();
  const std::size_t D = lip.dim();

  std::vector<double> mean(D, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    auto f = lip.frame(t);
    for (std::size_t d = 0; d < D; ++d) mean[d] += f[d];
  }
  for (double& m : mean) m /= static_cast<double>(T);

  LipStatistics s;
  for (std::size_t t = 0; t < T; ++t) {
    auto f = lip.frame(t);
    double sq = 0.0;
    for (std::size_t d = 0; d < D; ++d) {
      const double diff = static_cast<double>(f[d]) - mean[d];
      sq += diff * diff;
    }
    s.v_var += sq;
  }
  s.v_var /= static_cast<double>(T);

  for (std::size_t t = 1; t < T; ++t) {
    auto cur = lip.frame(t);
    auto prev = lip.frame(t - 1);
    double sq = 0.0;
    for (std::size_t d = 0; d < D; ++d) {
      const double diff = static_cast<double>(cur[d]) - static_cast<double>(prev[d]);
      sq += diff * diff;
    }
    s.v_sad += std::sqrt(sq);
  }

  if (!std::isfinite(s.v_var) || !std::isfinite(s.v_sad))
    throw Error(Errc::NonFiniteValue, "lip statistics overflowed");
  return s;
}

StatusVerdict judge(const FeatureStream& lip, const StatusConfig& cfg) {
  validate(cfg);
  const LipStatistics s = compute_statistics(lip);
  StatusVerdict v;
  v.v_var = s.v_var;
  v.v_sad = s.v_sad;
  if (cfg.normalize_sad) {
    v.v_sad /= static_cast<double>(std::max<std::size_t>(lip.frames() - 1, 1));
  }
  v.score = cfg.alpha * v.v_var + cfg.beta * v.v_sad;
  v.articulating = v.score > cfg.tau;
  return v;
}

FeatureStream purify(const FeatureStream& lip, const StatusVerdict& verdict) {
  if (!verdict.articulating) return lip;
  return FeatureStream::zeros(lip.kind(), lip.frames(), lip.dim(), lip.fps());
}

}  // namespace mind
