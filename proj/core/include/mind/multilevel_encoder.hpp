// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "mind/feature_streams.hpp"
#include "mind/micro_encoder.hpp"
#include "mind/nn/layers.hpp"

namespace mind {

struct FusionConfig {
  std::size_t d_me = 128;
  // Output width of the complex-dynamics path; also the attention model width,
  // so it must be divisible by num_heads.
  std::size_t d_complex = 256;
  std::size_t d_eye = 32;
  std::size_t d_head = 32;
  std::size_t d_llm = 1024;
  std::size_t num_heads = 4;
  std::size_t mlp_hidden = 512;
  double layernorm_epsilon = 1e-5;
  std::uint64_t seed = 0;
  StreamDims input;

  std::size_t mind_dim() const noexcept { return d_me + d_complex + d_eye + d_head; }
};

// Throws InvalidShape.
void validate(const FusionConfig& cfg);

// Path 2: Linear -> LayerNorm -> MHA -> LayerNorm -> MLP -> Linear, applied
// per frame to purified-lip ‖ emo, then mean-pooled over time.
struct ComplexPath {
  nn::LinearParams input;
  nn::LayerNormParams norm1;
  nn::MhaParams attention;
  nn::LayerNormParams norm2;
  nn::MlpParams mlp;
  nn::LinearParams output;
  bool operator==(const ComplexPath&) const = default;
};

struct FusionWeights {
  nn::LinearParams micro;      // head‖eye‖emo‖lip -> d_me (transient path)
  ComplexPath complex;         // lip‖emo -> d_complex
  nn::LinearParams eye;        // D_eye -> d_eye
  nn::LinearParams head;       // D_head -> d_head
  nn::LinearParams projector;  // V_MIND -> d_llm
  bool operator==(const FusionWeights&) const = default;
};

struct MindVector {
  nn::Vector v_mind;  // F'_ME ‖ F'_complex ‖ F'_eye ‖ F'_head
  nn::Vector v_proj;
};

// Deterministic from cfg.seed. Throws InvalidShape.
FusionWeights init_fusion(const FusionConfig& cfg);

std::vector<nn::TensorRef> collect(FusionWeights& w);

void save_fusion(FusionWeights w, const std::filesystem::path& path);
// Shapes come from cfg; throws ShapeMismatch if the checkpoint disagrees.
FusionWeights load_fusion(const FusionConfig& cfg, const std::filesystem::path& path);

// Throws ShapeMismatch when streams or f_me do not fit the weights.
MindVector fuse(const FacialDynamics& dyn, const FeatureStream& purified_lip,
                const MicroFeature& f_me, const FusionWeights& w);

struct FusionGrads {
  FusionWeights weights;  // same layout as the parameters; micro is all zeros
  nn::Vector f_me;
};

// Gradients of <grad_v_proj, v_proj> with respect to every fusion parameter and f_me.
FusionGrads fuse_backward(const FacialDynamics& dyn, const FeatureStream& purified_lip,
                          const MicroFeature& f_me, const FusionWeights& w,
                          std::span<const double> grad_v_proj);

}  // namespace mind
