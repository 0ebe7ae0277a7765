// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mind/nn/matrix.hpp"
#include "mind/nn/rng.hpp"

namespace mind::nn {

// ---------------------------------------------------------------------------
// Dense affine map: y_t = W x_t + b, weight is out×in.

struct LinearParams {
  Matrix weight;
  Vector bias;

  std::size_t in_dim() const noexcept { return weight.cols(); }
  std::size_t out_dim() const noexcept { return weight.rows(); }
  bool operator==(const LinearParams&) const = default;
};

struct LinearGrads {
  Matrix weight;
  Vector bias;
  Matrix input;
};

Matrix linear_forward(const LinearParams& p, const Matrix& x);
Vector linear_forward(const LinearParams& p, std::span<const double> x);
LinearGrads linear_backward(const LinearParams& p, const Matrix& x, const Matrix& grad_out);

// ---------------------------------------------------------------------------
// Layer normalization over the feature axis of each row.

struct LayerNormParams {
  Vector gain;
  Vector shift;
  double epsilon = 1e-5;

  std::size_t dim() const noexcept { return gain.size(); }
  bool operator==(const LayerNormParams&) const = default;
};

struct LayerNormGrads {
  Vector gain;
  Vector shift;
  Matrix input;
};

// Normalized rows before gain/shift are applied.
Matrix layernorm_normalize(const Matrix& x, double epsilon);
Matrix layernorm_forward(const LayerNormParams& p, const Matrix& x);
LayerNormGrads layernorm_backward(const LayerNormParams& p, const Matrix& x,
                                  const Matrix& grad_out);

// ---------------------------------------------------------------------------
// Row-wise softmax and the Gaussian-error activation used inside the MLP.

void softmax_rows(Matrix& scores);
double gelu(double x) noexcept;
double gelu_grad(double x) noexcept;

// ---------------------------------------------------------------------------
// Multi-head scaled dot-product self-attention over the temporal axis.
// No causal mask: every frame attends to the whole clip.

struct MhaParams {
  std::size_t num_heads = 1;
  LinearParams query;
  LinearParams key;
  LinearParams value;
  LinearParams output;

  std::size_t model_dim() const noexcept { return query.in_dim(); }
  bool operator==(const MhaParams&) const = default;
};

struct MhaTrace {
  Matrix query;
  Matrix key;
  Matrix value;
  std::vector<Matrix> attention;  // one T×T probability matrix per head
  Matrix heads;                   // concatenated per-head outputs, T×D
  Matrix output;
};

struct MhaGrads {
  LinearGrads query;
  LinearGrads key;
  LinearGrads value;
  LinearGrads output;
  Matrix input;
};

MhaTrace mha_forward_trace(const MhaParams& p, const Matrix& x);
Matrix mha_forward(const MhaParams& p, const Matrix& x);
MhaGrads mha_backward(const MhaParams& p, const Matrix& x, const Matrix& grad_out);

// ---------------------------------------------------------------------------
// Two-layer perceptron: Linear -> GELU -> Linear.

struct MlpParams {
  LinearParams hidden;
  LinearParams output;
  bool operator==(const MlpParams&) const = default;
};

struct MlpGrads {
  LinearGrads hidden;
  LinearGrads output;
  Matrix input;
};

Matrix mlp_forward(const MlpParams& p, const Matrix& x);
MlpGrads mlp_backward(const MlpParams& p, const Matrix& x, const Matrix& grad_out);

// ---------------------------------------------------------------------------
// Initialization. Weights and biases are uniform on ±1/sqrt(fan_in);
// layer-norm gain starts at 1 and shift at 0. Throws InvalidShape for zero dims.

LinearParams init_linear(std::size_t in_dim, std::size_t out_dim, Rng& rng);
LayerNormParams init_layernorm(std::size_t dim, double epsilon = 1e-5);
MhaParams init_mha(std::size_t model_dim, std::size_t num_heads, Rng& rng);
MlpParams init_mlp(std::size_t in_dim, std::size_t hidden_dim, std::size_t out_dim, Rng& rng);

// ---------------------------------------------------------------------------
// Named views of parameter storage, used by checkpoints and gradient checks.

struct TensorRef {
  std::string name;
  std::size_t rows;
  std::size_t cols;
  std::span<double> values;
};

void collect(LinearParams& p, const std::string& prefix, std::vector<TensorRef>& out);
void collect(LayerNormParams& p, const std::string& prefix, std::vector<TensorRef>& out);
void collect(MhaParams& p, const std::string& prefix, std::vector<TensorRef>& out);
void collect(MlpParams& p, const std::string& prefix, std::vector<TensorRef>& out);

}  // namespace mind::nn
