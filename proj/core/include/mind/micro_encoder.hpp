// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "mind/feature_streams.hpp"
#include "mind/nn/layers.hpp"

namespace mind {

struct MicroFeature {
  nn::Vector values;
};

// Rows t_start..t_end (inclusive) of head‖eye‖emo‖purified-lip, one row per frame.
// Throws SegmentOutOfBounds, or DimensionMismatch if purified_lip does not
// match the clip's lip stream shape.
nn::Matrix extract_segment(const FacialDynamics& dyn, const FeatureStream& purified_lip,
                           const MicroSegment& seg);

// Mean-pool each segment over time, average the segment means, then apply
// one linear map. An empty list maps the zero vector (result is the bias).
MicroFeature encode_micro(std::span<const nn::Matrix> segments, const nn::LinearParams& weights);

}  // namespace mind
