// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mind/micro_encoder.hpp"

#include "mind/error.hpp"

namespace mind {

nn::Matrix extract_segment(const FacialDynamics& dyn, const FeatureStream& purified_lip,
                           const MicroSegment& seg) {
  const std::size_t T = dyn.frames();
  if (seg.t_start > seg.t_end || seg.t_end >= T) {
    throw Error(Errc::SegmentOutOfBounds, "segment [" + std::to_string(seg.t_start) + ", " +
                                              std::to_string(seg.t_end) + "] outside clip of " +
                                              std::to_string(T) + " frames");
  }
  if (purified_lip.kind() != StreamKind::Lip || purified_lip.frames() != T ||
      purified_lip.dim() != dyn.lip.dim()) {
    throw Error(Errc::DimensionMismatch, "purified lip stream does not match clip shape");
  }

  nn::Matrix out(seg.t_end - seg.t_start + 1, dyn.total_dim());
  for (std::size_t t = seg.t_start; t <= seg.t_end; ++t) {
    auto row = out.row(t - seg.t_start);
    std::size_t col = 0;
    for (const FeatureStream* s : {&dyn.head, &dyn.eye, &dyn.emo, &purified_lip}) {
      for (float v : s->frame(t)) row[col++] = v;
    }
  }
  return out;
}

MicroFeature encode_micro(std::span<const nn::Matrix> segments, const nn::LinearParams& weights) {
  const std::size_t width = weights.in_dim();
  nn::Vector pooled(width, 0.0);
  for (const auto& seg : segments) {
    if (seg.cols() != width || seg.rows() == 0) {
      throw Error(Errc::ShapeMismatch, "micro segment is " + std::to_string(seg.rows()) + "x" +
                                           std::to_string(seg.cols()) + ", encoder expects width " +
                                           std::to_string(width));
    }
    const nn::Vector mean = nn::column_mean(seg);
    for (std::size_t j = 0; j < width; ++j) pooled[j] += mean[j];
  }
  if (!segments.empty()) {
    for (double& v : pooled) v /= static_cast<double>(segments.size());
  }
  return MicroFeature{nn::linear_forward(weights, pooled)};
}

}  // namespace mind
