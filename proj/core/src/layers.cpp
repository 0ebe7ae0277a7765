// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mind/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mind/error.hpp"

namespace mind::nn {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::ShapeMismatch, what);
}

void require_shape(const LinearParams& p) {
  require(p.bias.size() == p.weight.rows(), "linear bias length does not match weight rows");
}

Matrix slice_cols(const Matrix& m, std::size_t begin, std::size_t width) {
  Matrix out(m.rows(), width);
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < width; ++c) out(r, c) = m(r, begin + c);
  return out;
}

void place_cols(Matrix& dst, const Matrix& src, std::size_t begin) {
  for (std::size_t r = 0; r < src.rows(); ++r)
    for (std::size_t c = 0; c < src.cols(); ++c) dst(r, begin + c) = src(r, c);
}

void add_into(Matrix& dst, const Matrix& src) {
  auto d = dst.data();
  auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

}  // namespace

// --- linear ----------------------------------------------------------------

Matrix linear_forward(const LinearParams& p, const Matrix& x) {
  require_shape(p);
  require(x.cols() == p.in_dim(), "linear input width " + std::to_string(x.cols()) +
                                      " != " + std::to_string(p.in_dim()));
  Matrix y = matmul_nt(x, p.weight);
  for (std::size_t t = 0; t < y.rows(); ++t) {
    auto row = y.row(t);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += p.bias[j];
  }
  return y;
}

Vector linear_forward(const LinearParams& p, std::span<const double> x) {
  Matrix y = linear_forward(p, Matrix::from_row(x));
  auto row = y.row(0);
  return Vector(row.begin(), row.end());
}

LinearGrads linear_backward(const LinearParams& p, const Matrix& x, const Matrix& grad_out) {
  require_shape(p);
  require(x.cols() == p.in_dim(), "linear_backward input width mismatch");
  require(grad_out.rows() == x.rows() && grad_out.cols() == p.out_dim(),
          "linear_backward upstream gradient shape mismatch");
  LinearGrads g;
  g.weight = matmul_tn(grad_out, x);
  g.bias = column_sum(grad_out);
  g.input = matmul(grad_out, p.weight);
  return g;
}

// --- layer norm ------------------------------------------------------------

Matrix layernorm_normalize(const Matrix& x, double epsilon) {
  require(x.cols() >= 1, "layernorm needs D >= 1");
  Matrix out(x.rows(), x.cols());
  const double inv_d = 1.0 / static_cast<double>(x.cols());
  for (std::size_t t = 0; t < x.rows(); ++t) {
    auto in = x.row(t);
    double mean = 0.0;
    for (double v : in) mean += v;
    mean *= inv_d;
    double var = 0.0;
    for (double v : in) var += (v - mean) * (v - mean);
    var *= inv_d;
    const double inv_std = 1.0 / std::sqrt(var + epsilon);
    auto o = out.row(t);
    for (std::size_t j = 0; j < in.size(); ++j) o[j] = (in[j] - mean) * inv_std;
  }
  return out;
}

Matrix layernorm_forward(const LayerNormParams& p, const Matrix& x) {
  require(p.shift.size() == p.gain.size(), "layernorm gain/shift length mismatch");
  require(x.cols() == p.dim(), "layernorm width " + std::to_string(x.cols()) +
                                   " != " + std::to_string(p.dim()));
  Matrix y = layernorm_normalize(x, p.epsilon);
  for (std::size_t t = 0; t < y.rows(); ++t) {
    auto row = y.row(t);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = row[j] * p.gain[j] + p.shift[j];
  }
  return y;
}

LayerNormGrads layernorm_backward(const LayerNormParams& p, const Matrix& x,
                                  const Matrix& grad_out) {
  require(x.cols() == p.dim(), "layernorm_backward width mismatch");
  require(grad_out.rows() == x.rows() && grad_out.cols() == x.cols(),
          "layernorm_backward upstream gradient shape mismatch");
  const std::size_t d = x.cols();
  const double inv_d = 1.0 / static_cast<double>(d);
  LayerNormGrads g;
  g.gain.assign(d, 0.0);
  g.shift.assign(d, 0.0);
  g.input = Matrix(x.rows(), d);
  std::vector<double> xhat(d), dxhat(d);
  for (std::size_t t = 0; t < x.rows(); ++t) {
    auto in = x.row(t);
    auto dy = grad_out.row(t);
    double mean = 0.0;
    for (double v : in) mean += v;
    mean *= inv_d;
    double var = 0.0;
    for (double v : in) var += (v - mean) * (v - mean);
    var *= inv_d;
    const double inv_std = 1.0 / std::sqrt(var + p.epsilon);
    double mean_dxhat = 0.0;
    double mean_dxhat_xhat = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      xhat[j] = (in[j] - mean) * inv_std;
      dxhat[j] = dy[j] * p.gain[j];
      g.gain[j] += dy[j] * xhat[j];
      g.shift[j] += dy[j];
      mean_dxhat += dxhat[j];
      mean_dxhat_xhat += dxhat[j] * xhat[j];
    }
    mean_dxhat *= inv_d;
    mean_dxhat_xhat *= inv_d;
    auto dx = g.input.row(t);
    for (std::size_t j = 0; j < d; ++j)
      dx[j] = inv_std * (dxhat[j] - mean_dxhat - xhat[j] * mean_dxhat_xhat);
  }
  return g;
}

// --- activations -----------------------------------------------------------

void softmax_rows(Matrix& scores) {
  for (std::size_t r = 0; r < scores.rows(); ++r) {
    auto row = scores.row(r);
    if (row.empty()) continue;
    const double peak = *std::max_element(row.begin(), row.end());
    double total = 0.0;
    for (double& v : row) {
      v = std::exp(v - peak);
      total += v;
    }
    for (double& v : row) v /= total;
  }
}

double gelu(double x) noexcept { return 0.5 * x * (1.0 + std::erf(x * std::numbers::sqrt2 / 2.0)); }

double gelu_grad(double x) noexcept {
  const double cdf = 0.5 * (1.0 + std::erf(x * std::numbers::sqrt2 / 2.0));
  const double pdf = std::exp(-0.5 * x * x) * std::numbers::inv_sqrtpi / std::numbers::sqrt2;
  return cdf + x * pdf;
}

// --- attention -------------------------------------------------------------

namespace {

void require_mha(const MhaParams& p, const Matrix& x) {
  const std::size_t d = p.model_dim();
  require(p.num_heads >= 1, "attention needs at least one head");
  require(d % p.num_heads == 0, "model dim " + std::to_string(d) + " not divisible by " +
                                    std::to_string(p.num_heads) + " heads");
  for (const LinearParams* lp : {&p.query, &p.key, &p.value, &p.output})
    require(lp->in_dim() == d && lp->out_dim() == d, "attention projections must be DxD");
  require(x.cols() == d, "attention input width " + std::to_string(x.cols()) + " != " +
                             std::to_string(d));
}

}  // namespace

MhaTrace mha_forward_trace(const MhaParams& p, const Matrix& x) {
  require_mha(p, x);
  const std::size_t d = p.model_dim();
  const std::size_t head_dim = d / p.num_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

  MhaTrace tr;
  tr.query = linear_forward(p.query, x);
  tr.key = linear_forward(p.key, x);
  tr.value = linear_forward(p.value, x);
  tr.heads = Matrix(x.rows(), d);
  tr.attention.reserve(p.num_heads);
  for (std::size_t h = 0; h < p.num_heads; ++h) {
    const std::size_t off = h * head_dim;
    Matrix qh = slice_cols(tr.query, off, head_dim);
    Matrix kh = slice_cols(tr.key, off, head_dim);
    Matrix vh = slice_cols(tr.value, off, head_dim);
    Matrix scores = matmul_nt(qh, kh);
    for (double& s : scores.data()) s *= scale;
    softmax_rows(scores);
    place_cols(tr.heads, matmul(scores, vh), off);
    tr.attention.push_back(std::move(scores));
  }
  tr.output = linear_forward(p.output, tr.heads);
  return tr;
}

Matrix mha_forward(const MhaParams& p, const Matrix& x) { return mha_forward_trace(p, x).output; }

MhaGrads mha_backward(const MhaParams& p, const Matrix& x, const Matrix& grad_out) {
  const MhaTrace tr = mha_forward_trace(p, x);
  const std::size_t d = p.model_dim();
  const std::size_t head_dim = d / p.num_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

  MhaGrads g;
  g.output = linear_backward(p.output, tr.heads, grad_out);
  const Matrix& d_heads = g.output.input;

  Matrix d_query(x.rows(), d), d_key(x.rows(), d), d_value(x.rows(), d);
  for (std::size_t h = 0; h < p.num_heads; ++h) {
    const std::size_t off = h * head_dim;
    const Matrix& attn = tr.attention[h];
    Matrix qh = slice_cols(tr.query, off, head_dim);
    Matrix kh = slice_cols(tr.key, off, head_dim);
    Matrix vh = slice_cols(tr.value, off, head_dim);
    Matrix d_out_h = slice_cols(d_heads, off, head_dim);

    Matrix d_attn = matmul_nt(d_out_h, vh);
    Matrix d_vh = matmul_tn(attn, d_out_h);

    // Softmax Jacobian applied row-wise: dS = A ∘ (dA − rowsum(dA ∘ A)).
    Matrix d_scores(attn.rows(), attn.cols());
    for (std::size_t i = 0; i < attn.rows(); ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < attn.cols(); ++j) dot += d_attn(i, j) * attn(i, j);
      for (std::size_t j = 0; j < attn.cols(); ++j)
        d_scores(i, j) = attn(i, j) * (d_attn(i, j) - dot) * scale;
    }
    place_cols(d_query, matmul(d_scores, kh), off);
    place_cols(d_key, matmul_tn(d_scores, qh), off);
    place_cols(d_value, d_vh, off);
  }

  g.query = linear_backward(p.query, x, d_query);
  g.key = linear_backward(p.key, x, d_key);
  g.value = linear_backward(p.value, x, d_value);
  g.input = g.query.input;
  add_into(g.input, g.key.input);
  add_into(g.input, g.value.input);
  return g;
}

// --- mlp -------------------------------------------------------------------

Matrix mlp_forward(const MlpParams& p, const Matrix& x) {
  require(p.hidden.out_dim() == p.output.in_dim(), "mlp inner widths do not chain");
  Matrix h = linear_forward(p.hidden, x);
  for (double& v : h.data()) v = gelu(v);
  return linear_forward(p.output, h);
}

MlpGrads mlp_backward(const MlpParams& p, const Matrix& x, const Matrix& grad_out) {
  require(p.hidden.out_dim() == p.output.in_dim(), "mlp inner widths do not chain");
  const Matrix pre = linear_forward(p.hidden, x);
  Matrix act = pre;
  for (double& v : act.data()) v = gelu(v);

  MlpGrads g;
  g.output = linear_backward(p.output, act, grad_out);
  Matrix d_pre = g.output.input;
  auto dp = d_pre.data();
  auto pv = pre.data();
  for (std::size_t i = 0; i < dp.size(); ++i) dp[i] *= gelu_grad(pv[i]);
  g.hidden = linear_backward(p.hidden, x, d_pre);
  g.input = g.hidden.input;
  return g;
}

// --- init ------------------------------------------------------------------

LinearParams init_linear(std::size_t in_dim, std::size_t out_dim, Rng& rng) {
  if (in_dim == 0 || out_dim == 0) {
    throw Error(Errc::InvalidShape, "linear layer dims must be positive (got " +
                                        std::to_string(in_dim) + "->" + std::to_string(out_dim) +
                                        ")");
  }
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim));
  LinearParams p{Matrix(out_dim, in_dim), Vector(out_dim)};
  for (double& w : p.weight.data()) w = rng.uniform(-bound, bound);
  for (double& b : p.bias) b = rng.uniform(-bound, bound);
  return p;
}

LayerNormParams init_layernorm(std::size_t dim, double epsilon) {
  if (dim == 0) throw Error(Errc::InvalidShape, "layernorm dim must be positive");
  if (!(epsilon > 0.0)) throw Error(Errc::InvalidShape, "layernorm epsilon must be positive");
  return LayerNormParams{Vector(dim, 1.0), Vector(dim, 0.0), epsilon};
}

MhaParams init_mha(std::size_t model_dim, std::size_t num_heads, Rng& rng) {
  if (num_heads == 0 || model_dim == 0 || model_dim % num_heads != 0) {
    throw Error(Errc::InvalidShape, "attention model dim " + std::to_string(model_dim) +
                                        " must be a positive multiple of num_heads " +
                                        std::to_string(num_heads));
  }
  MhaParams p;
  p.num_heads = num_heads;
  p.query = init_linear(model_dim, model_dim, rng);
  p.key = init_linear(model_dim, model_dim, rng);
  p.value = init_linear(model_dim, model_dim, rng);
  p.output = init_linear(model_dim, model_dim, rng);
  return p;
}

MlpParams init_mlp(std::size_t in_dim, std::size_t hidden_dim, std::size_t out_dim, Rng& rng) {
  MlpParams p;
  p.hidden = init_linear(in_dim, hidden_dim, rng);
  p.output = init_linear(hidden_dim, out_dim, rng);
  return p;
}

// --- parameter views -------------------------------------------------------

void collect(LinearParams& p, const std::string& prefix, std::vector<TensorRef>& out) {
  out.push_back({prefix + ".weight", p.weight.rows(), p.weight.cols(), p.weight.data()});
  out.push_back({prefix + ".bias", 1, p.bias.size(), std::span<double>(p.bias)});
}

void collect(LayerNormParams& p, const std::string& prefix, std::vector<TensorRef>& out) {
  out.push_back({prefix + ".gain", 1, p.gain.size(), std::span<double>(p.gain)});
  out.push_back({prefix + ".shift", 1, p.shift.size(), std::span<double>(p.shift)});
}

void collect(MhaParams& p, const std::string& prefix, std::vector<TensorRef>& out) {
  collect(p.query, prefix + ".query", out);
  collect(p.key, prefix + ".key", out);
  collect(p.value, prefix + ".value", out);
  collect(p.output, prefix + ".output", out);
}

void collect(MlpParams& p, const std::string& prefix, std::vector<TensorRef>& out) {
  collect(p.hidden, prefix + ".hidden", out);
  collect(p.output, prefix + ".output", out);
}

}  // namespace mind::nn
