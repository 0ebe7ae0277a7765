// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mind/multilevel_encoder.hpp"

#include "mind/error.hpp"
#include "mind/nn/checkpoint.hpp"
#include "mind/nn/rng.hpp"

namespace mind {

void validate(const FusionConfig& cfg) {
  for (std::size_t v : {cfg.d_me, cfg.d_complex, cfg.d_eye, cfg.d_head, cfg.d_llm, cfg.num_heads,
                        cfg.mlp_hidden, cfg.input.head, cfg.input.eye, cfg.input.emo, cfg.input.lip}) {
    if (v == 0) throw Error(Errc::InvalidShape, "fusion widths must all be positive");
  }
  if (cfg.d_complex % cfg.num_heads != 0) {
    throw Error(Errc::InvalidShape, "d_complex " + std::to_string(cfg.d_complex) +
                                        " not divisible by num_heads " +
                                        std::to_string(cfg.num_heads));
  }
  if (!(cfg.layernorm_epsilon > 0.0)) throw Error(Errc::InvalidShape, "layernorm epsilon must be > 0");
}

FusionWeights init_fusion(const FusionConfig& cfg) {
  validate(cfg);
  nn::Rng rng(cfg.seed);
  FusionWeights w;
  w.micro = nn::init_linear(cfg.input.total(), cfg.d_me, rng);
  w.complex.input = nn::init_linear(cfg.input.lip + cfg.input.emo, cfg.d_complex, rng);
  w.complex.norm1 = nn::init_layernorm(cfg.d_complex, cfg.layernorm_epsilon);
  w.complex.attention = nn::init_mha(cfg.d_complex, cfg.num_heads, rng);
  w.complex.norm2 = nn::init_layernorm(cfg.d_complex, cfg.layernorm_epsilon);
  w.complex.mlp = nn::init_mlp(cfg.d_complex, cfg.mlp_hidden, cfg.d_complex, rng);
  w.complex.output = nn::init_linear(cfg.d_complex, cfg.d_complex, rng);
  w.eye = nn::init_linear(cfg.input.eye, cfg.d_eye, rng);
  w.head = nn::init_linear(cfg.input.head, cfg.d_head, rng);
  w.projector = nn::init_linear(cfg.mind_dim(), cfg.d_llm, rng);
  return w;
}

std::vector<nn::TensorRef> collect(FusionWeights& w) {
  std::vector<nn::TensorRef> refs;
  nn::collect(w.micro, "micro", refs);
  nn::collect(w.complex.input, "complex.input", refs);
  nn::collect(w.complex.norm1, "complex.norm1", refs);
  nn::collect(w.complex.attention, "complex.attention", refs);
  nn::collect(w.complex.norm2, "complex.norm2", refs);
  nn::collect(w.complex.mlp, "complex.mlp", refs);
  nn::collect(w.complex.output, "complex.output", refs);
  nn::collect(w.eye, "eye", refs);
  nn::collect(w.head, "head", refs);
  nn::collect(w.projector, "projector", refs);
  return refs;
}

void save_fusion(FusionWeights w, const std::filesystem::path& path) {
  nn::write_checkpoint(nn::snapshot(collect(w)), path);
}

FusionWeights load_fusion(const FusionConfig& cfg, const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(Errc::MissingCheckpoint, "checkpoint not found: " + path.string());
  }
  FusionWeights w = init_fusion(cfg);
  nn::restore(collect(w), nn::read_checkpoint(path));
  return w;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::ShapeMismatch, what);
}

void check_inputs(const FacialDynamics& dyn, const FeatureStream& purified_lip,
                  const MicroFeature& f_me, const FusionWeights& w) {
  require(purified_lip.frames() == dyn.frames() && purified_lip.dim() == dyn.lip.dim(),
          "purified lip stream does not match the clip");
  require(w.complex.input.in_dim() == purified_lip.dim() + dyn.emo.dim(),
          "complex path expects lip+emo width " + std::to_string(w.complex.input.in_dim()));
  require(w.eye.in_dim() == dyn.eye.dim(), "eye path width mismatch");
  require(w.head.in_dim() == dyn.head.dim(), "head path width mismatch");
  require(f_me.values.size() + w.complex.output.out_dim() + w.eye.out_dim() + w.head.out_dim() ==
              w.projector.in_dim(),
          "V_MIND width does not match projector input");
}

struct ComplexTrace {
  nn::Matrix x0, h1, h2, h3, h4, h5, h6;
};

ComplexTrace run_complex(const ComplexPath& p, const FeatureStream& lip, const FeatureStream& emo) {
  ComplexTrace tr;
  tr.x0 = nn::hconcat(lip.to_matrix(), emo.to_matrix());
  tr.h1 = nn::linear_forward(p.input, tr.x0);
  tr.h2 = nn::layernorm_forward(p.norm1, tr.h1);
  tr.h3 = nn::mha_forward(p.attention, tr.h2);
  tr.h4 = nn::layernorm_forward(p.norm2, tr.h3);
  tr.h5 = nn::mlp_forward(p.mlp, tr.h4);
  tr.h6 = nn::linear_forward(p.output, tr.h5);
  return tr;
}

void append(nn::Vector& dst, const nn::Vector& src) { dst.insert(dst.end(), src.begin(), src.end()); }

}  // namespace

MindVector fuse(const FacialDynamics& dyn, const FeatureStream& purified_lip,
                const MicroFeature& f_me, const FusionWeights& w) {
  check_inputs(dyn, purified_lip, f_me, w);

  const ComplexTrace tr = run_complex(w.complex, purified_lip, dyn.emo);
  const nn::Vector f_complex = nn::column_mean(tr.h6);
  const nn::Vector f_eye = nn::linear_forward(w.eye, nn::column_mean(dyn.eye.to_matrix()));
  const nn::Vector f_head = nn::linear_forward(w.head, nn::column_mean(dyn.head.to_matrix()));

  MindVector out;
  out.v_mind.reserve(w.projector.in_dim());
  append(out.v_mind, f_me.values);
  append(out.v_mind, f_complex);
  append(out.v_mind, f_eye);
  append(out.v_mind, f_head);
  out.v_proj = nn::linear_forward(w.projector, out.v_mind);
  return out;
}

FusionGrads fuse_backward(const FacialDynamics& dyn, const FeatureStream& purified_lip,
                          const MicroFeature& f_me, const FusionWeights& w,
                          std::span<const double> grad_v_proj) {
  check_inputs(dyn, purified_lip, f_me, w);
  require(grad_v_proj.size() == w.projector.out_dim(), "v_proj gradient length mismatch");

  const ComplexTrace tr = run_complex(w.complex, purified_lip, dyn.emo);
  const nn::Vector eye_mean = nn::column_mean(dyn.eye.to_matrix());
  const nn::Vector head_mean = nn::column_mean(dyn.head.to_matrix());

  nn::Vector v_mind;
  append(v_mind, f_me.values);
  append(v_mind, nn::column_mean(tr.h6));
  append(v_mind, nn::linear_forward(w.eye, eye_mean));
  append(v_mind, nn::linear_forward(w.head, head_mean));

  FusionGrads g;
  g.weights = w;
  for (auto& ref : collect(g.weights)) std::fill(ref.values.begin(), ref.values.end(), 0.0);

  const nn::Matrix gp = nn::Matrix::from_row(grad_v_proj);
  auto proj = nn::linear_backward(w.projector, nn::Matrix::from_row(v_mind), gp);
  g.weights.projector.weight = std::move(proj.weight);
  g.weights.projector.bias = std::move(proj.bias);
  auto dv = proj.input.row(0);

  const std::size_t d_me = f_me.values.size();
  const std::size_t d_complex = w.complex.output.out_dim();
  const std::size_t d_eye = w.eye.out_dim();
  const std::size_t d_head = w.head.out_dim();
  g.f_me.assign(dv.begin(), dv.begin() + static_cast<std::ptrdiff_t>(d_me));
  auto d_fc = dv.subspan(d_me, d_complex);
  auto d_fe = dv.subspan(d_me + d_complex, d_eye);
  auto d_fh = dv.subspan(d_me + d_complex + d_eye, d_head);

  auto eye = nn::linear_backward(w.eye, nn::Matrix::from_row(eye_mean), nn::Matrix::from_row(d_fe));
  g.weights.eye.weight = std::move(eye.weight);
  g.weights.eye.bias = std::move(eye.bias);
  auto head = nn::linear_backward(w.head, nn::Matrix::from_row(head_mean), nn::Matrix::from_row(d_fh));
  g.weights.head.weight = std::move(head.weight);
  g.weights.head.bias = std::move(head.bias);

  // Mean-pool backward spreads the gradient evenly over frames.
  const std::size_t T = tr.h6.rows();
  nn::Matrix d_h6(T, d_complex);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t j = 0; j < d_complex; ++j) d_h6(t, j) = d_fc[j] / static_cast<double>(T);

  ComplexPath& gc = g.weights.complex;
  auto out = nn::linear_backward(w.complex.output, tr.h5, d_h6);
  gc.output.weight = std::move(out.weight);
  gc.output.bias = std::move(out.bias);
  auto mlp = nn::mlp_backward(w.complex.mlp, tr.h4, out.input);
  gc.mlp.hidden.weight = std::move(mlp.hidden.weight);
  gc.mlp.hidden.bias = std::move(mlp.hidden.bias);
  gc.mlp.output.weight = std::move(mlp.output.weight);
  gc.mlp.output.bias = std::move(mlp.output.bias);
  auto ln2 = nn::layernorm_backward(w.complex.norm2, tr.h3, mlp.input);
  gc.norm2.gain = std::move(ln2.gain);
  gc.norm2.shift = std::move(ln2.shift);
  auto mha = nn::mha_backward(w.complex.attention, tr.h2, ln2.input);
  for (auto [dst, src] : {std::pair{&gc.attention.query, &mha.query},
                          std::pair{&gc.attention.key, &mha.key},
                          std::pair{&gc.attention.value, &mha.value},
                          std::pair{&gc.attention.output, &mha.output}}) {
    dst->weight = std::move(src->weight);
    dst->bias = std::move(src->bias);
  }
  auto ln1 = nn::layernorm_backward(w.complex.norm1, tr.h1, mha.input);
  gc.norm1.gain = std::move(ln1.gain);
  gc.norm1.shift = std::move(ln1.shift);
  auto in = nn::linear_backward(w.complex.input, tr.x0, ln1.input);
  gc.input.weight = std::move(in.weight);
  gc.input.bias = std::move(in.bias);
  return g;
}

}  // namespace mind
