// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mind/feature_streams.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "binary_io.hpp"
#include "mind/error.hpp"
#include "mind/nn/rng.hpp"

namespace mind {

using nlohmann::json;

std::string_view to_string(StreamKind kind) noexcept {
  switch (kind) {
    case StreamKind::Head: return "head";
    case StreamKind::Eye: return "eye";
    case StreamKind::Emo: return "emo";
    case StreamKind::Lip: return "lip";
  }
  return "?";
}

std::optional<StreamKind> parse_stream_kind(std::string_view name) noexcept {
  for (StreamKind k : {StreamKind::Head, StreamKind::Eye, StreamKind::Emo, StreamKind::Lip})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

// --- FeatureStream ---------------------------------------------------------

FeatureStream::FeatureStream(StreamKind kind, std::size_t frames, std::size_t dim, double fps,
                             std::vector<float> values)
    : kind_(kind), frames_(frames), dim_(dim), fps_(fps), values_(std::move(values)) {
  if (frames_ == 0 || dim_ == 0) {
    throw Error(Errc::DimensionMismatch, std::string(to_string(kind)) + " stream needs T>=1, D>=1");
  }
  if (values_.size() != frames_ * dim_) {
    throw Error(Errc::DimensionMismatch,
                std::string(to_string(kind)) + " stream holds " + std::to_string(values_.size()) +
                    " values, expected " + std::to_string(frames_) + "x" + std::to_string(dim_));
  }
  if (!(std::isfinite(fps_) && fps_ > 0.0)) {
    throw Error(Errc::InvalidSpec, "fps must be a positive finite number");
  }
  for (float v : values_) {
    if (!std::isfinite(v)) {
      throw Error(Errc::NonFiniteValue, std::string(to_string(kind)) + " stream has NaN/Inf");
    }
  }
}

FeatureStream FeatureStream::from_matrix(StreamKind kind, const nn::Matrix& m, double fps) {
  std::vector<float> values(m.size());
  auto src = m.data();
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<float>(src[i]);
  return FeatureStream(kind, m.rows(), m.cols(), fps, std::move(values));
}

FeatureStream FeatureStream::zeros(StreamKind kind, std::size_t frames, std::size_t dim,
                                   double fps) {
  return FeatureStream(kind, frames, dim, fps, std::vector<float>(frames * dim, 0.0f));
}

nn::Matrix FeatureStream::to_matrix() const {
  std::vector<double> data(values_.begin(), values_.end());
  return nn::Matrix(frames_, dim_, std::move(data));
}

bool FeatureStream::bit_equal(const FeatureStream& other) const noexcept {
  if (kind_ != other.kind_ || frames_ != other.frames_ || dim_ != other.dim_ ||
      std::bit_cast<std::uint64_t>(fps_) != std::bit_cast<std::uint64_t>(other.fps_)) {
    return false;
  }
  return std::equal(values_.begin(), values_.end(), other.values_.begin(), [](float a, float b) {
    return std::bit_cast<std::uint32_t>(a) == std::bit_cast<std::uint32_t>(b);
  });
}

bool FacialDynamics::bit_equal(const FacialDynamics& other) const noexcept {
  return clip_id == other.clip_id && head.bit_equal(other.head) && eye.bit_equal(other.eye) &&
         emo.bit_equal(other.emo) && lip.bit_equal(other.lip);
}

void validate(const FacialDynamics& dyn) {
  const std::array<std::pair<const FeatureStream*, StreamKind>, 4> slots = {{
      {&dyn.head, StreamKind::Head},
      {&dyn.eye, StreamKind::Eye},
      {&dyn.emo, StreamKind::Emo},
      {&dyn.lip, StreamKind::Lip},
  }};
  for (const auto& [stream, kind] : slots) {
    if (stream->kind() != kind) {
      throw Error(Errc::DimensionMismatch, "stream of kind " + std::string(to_string(stream->kind())) +
                                               " stored in " + std::string(to_string(kind)) + " slot");
    }
    if (stream->frames() != dyn.head.frames()) {
      throw Error(Errc::DimensionMismatch,
                  std::string(to_string(kind)) + " stream has T=" + std::to_string(stream->frames()) +
                      " but head has T=" + std::to_string(dyn.head.frames()));
    }
    if (stream->fps() != dyn.head.fps()) {
      throw Error(Errc::DimensionMismatch, std::string(to_string(kind)) + " stream fps differs");
    }
  }
}

void validate(const Annotation& ann, std::size_t frames) {
  for (const auto& seg : ann.micro_segments) {
    if (seg.t_start > seg.t_end || seg.t_end >= frames) {
      throw Error(Errc::SegmentOutOfBounds,
                  "clip " + ann.clip_id + " segment [" + std::to_string(seg.t_start) + ", " +
                      std::to_string(seg.t_end) + "] outside 0.." + std::to_string(frames - 1));
    }
  }
}

// --- container -------------------------------------------------------------

std::string encode_container(const FacialDynamics& dyn) {
  validate(dyn);
  json header;
  header["clip_id"] = dyn.clip_id;
  header["fps"] = dyn.fps();
  header["streams"] = json::array();
  std::string payload;
  for (const FeatureStream* s : {&dyn.head, &dyn.eye, &dyn.emo, &dyn.lip}) {
    header["streams"].push_back({{"kind", to_string(s->kind())}, {"T", s->frames()}, {"D", s->dim()}});
    for (float v : s->values()) detail::put_f32(payload, v);
  }
  std::string out = detail::frame(kContainerMagic, header.dump());
  out += payload;
  return out;
}

FacialDynamics decode_container(const std::string& bytes) {
  const detail::Frame f = detail::unframe(kContainerMagic, bytes);
  json header;
  try {
    header = json::parse(f.header);
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedHeader, std::string("container header: ") + e.what());
  }

  std::string clip_id;
  double fps = 0.0;
  struct Decl {
    StreamKind kind;
    std::size_t frames;
    std::size_t dim;
  };
  std::vector<Decl> decls;
  try {
    clip_id = header.at("clip_id").get<std::string>();
    fps = header.at("fps").get<double>();
    for (const auto& s : header.at("streams")) {
      auto kind = parse_stream_kind(s.at("kind").get<std::string>());
      if (!kind) throw Error(Errc::MalformedHeader, "unknown stream kind " + s.at("kind").dump());
      decls.push_back({*kind, s.at("T").get<std::size_t>(), s.at("D").get<std::size_t>()});
    }
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedHeader, std::string("container header: ") + e.what());
  }
  if (decls.size() != 4) {
    throw Error(Errc::MalformedHeader, "expected 4 streams, header declares " +
                                           std::to_string(decls.size()));
  }

  std::size_t expected = 0;
  for (const auto& d : decls) {
    if (d.frames != 0 && d.dim > (SIZE_MAX / 4) / d.frames) {
      throw Error(Errc::MalformedHeader, "stream shape overflows");
    }
    expected += 4 * d.frames * d.dim;
  }
  if (f.payload.size() != expected) {
    throw Error(Errc::MalformedHeader, "payload is " + std::to_string(f.payload.size()) +
                                           " bytes, header declares " + std::to_string(expected));
  }

  std::array<std::optional<FeatureStream>, 4> slots;
  const auto* p = reinterpret_cast<const unsigned char*>(f.payload.data());
  for (const auto& d : decls) {
    std::vector<float> values(d.frames * d.dim);
    for (float& v : values) {
      v = detail::get_f32(p);
      p += 4;
    }
    auto& slot = slots[static_cast<std::size_t>(d.kind)];
    if (slot) throw Error(Errc::MalformedHeader, "duplicate stream " + std::string(to_string(d.kind)));
    if (!(std::isfinite(fps) && fps > 0.0)) throw Error(Errc::MalformedHeader, "fps must be positive");
    slot.emplace(d.kind, d.frames, d.dim, fps, std::move(values));
  }

  FacialDynamics dyn{std::move(clip_id), std::move(*slots[0]), std::move(*slots[1]),
                     std::move(*slots[2]), std::move(*slots[3])};
  validate(dyn);
  return dyn;
}

void write_container(const FacialDynamics& dyn, const std::filesystem::path& path) {
  detail::write_file_atomic(path, encode_container(dyn));
}

FacialDynamics read_container(const std::filesystem::path& path) {
  return decode_container(detail::read_file(path));
}

// --- csv -------------------------------------------------------------------

FeatureStream read_stream_csv(const std::filesystem::path& path, StreamKind kind, double fps) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path.string());
  std::vector<float> values;
  std::size_t dim = 0;
  std::size_t frames = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t cols = 0;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t");
      const auto e = cell.find_last_not_of(" \t");
      if (b == std::string::npos) {
        throw Error(Errc::MalformedHeader, path.string() + ": empty cell on row " +
                                               std::to_string(frames + 1));
      }
      std::string_view tok(cell.data() + b, e - b + 1);
      float v = 0.0f;
      auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
        throw Error(Errc::MalformedHeader, path.string() + ": bad number '" + std::string(tok) + "'");
      }
      values.push_back(v);
      ++cols;
    }
    if (frames == 0) dim = cols;
    if (cols != dim) {
      throw Error(Errc::DimensionMismatch, path.string() + ": row " + std::to_string(frames + 1) +
                                               " has " + std::to_string(cols) + " columns, expected " +
                                               std::to_string(dim));
    }
    ++frames;
  }
  return FeatureStream(kind, frames, dim, fps, std::move(values));
}

FacialDynamics read_dynamics_csv(const std::filesystem::path& dir, std::string clip_id, double fps) {
  FacialDynamics dyn{std::move(clip_id), read_stream_csv(dir / "head.csv", StreamKind::Head, fps),
                     read_stream_csv(dir / "eye.csv", StreamKind::Eye, fps),
                     read_stream_csv(dir / "emo.csv", StreamKind::Emo, fps),
                     read_stream_csv(dir / "lip.csv", StreamKind::Lip, fps)};
  validate(dyn);
  return dyn;
}

// --- annotations -----------------------------------------------------------

std::string encode_annotations(std::vector<Annotation> annotations) {
  std::sort(annotations.begin(), annotations.end(),
            [](const Annotation& a, const Annotation& b) { return a.clip_id < b.clip_id; });
  json doc = json::array();
  for (const auto& a : annotations) {
    json segs = json::array();
    for (const auto& s : a.micro_segments) segs.push_back({{"t_start", s.t_start}, {"t_end", s.t_end}});
    json obj = {{"clip_id", a.clip_id},
                {"micro_segments", segs},
                {"micro_label", a.micro_label},
                {"macro_label", a.macro_label}};
    if (a.reference_analysis) obj["reference_analysis"] = *a.reference_analysis;
    doc.push_back(std::move(obj));
  }
  return doc.dump(2) + "\n";
}

std::vector<Annotation> decode_annotations(const std::string& text) {
  std::vector<Annotation> out;
  try {
    const json doc = json::parse(text);
    if (!doc.is_array()) throw Error(Errc::MalformedHeader, "annotation document must be an array");
    for (const auto& obj : doc) {
      Annotation a;
      a.clip_id = obj.at("clip_id").get<std::string>();
      for (const auto& s : obj.at("micro_segments")) {
        a.micro_segments.push_back({s.at("t_start").get<std::size_t>(), s.at("t_end").get<std::size_t>()});
      }
      a.micro_label = obj.at("micro_label").get<std::string>();
      a.macro_label = obj.at("macro_label").get<std::string>();
      if (obj.contains("reference_analysis") && !obj["reference_analysis"].is_null()) {
        a.reference_analysis = obj["reference_analysis"].get<std::string>();
      }
      out.push_back(std::move(a));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedHeader, std::string("annotation document: ") + e.what());
  }
  return out;
}

void write_annotations(const std::vector<Annotation>& annotations, const std::filesystem::path& path) {
  detail::write_file_atomic(path, encode_annotations(annotations));
}

std::vector<Annotation> read_annotations(const std::filesystem::path& path) {
  return decode_annotations(detail::read_file(path));
}

// --- synthetic -------------------------------------------------------------

std::string_view to_string(SyntheticMode mode) noexcept {
  switch (mode) {
    case SyntheticMode::Articulating: return "articulating";
    case SyntheticMode::Static: return "static";
    case SyntheticMode::HeldExpression: return "held";
  }
  return "?";
}

std::optional<SyntheticMode> parse_synthetic_mode(std::string_view name) noexcept {
  for (SyntheticMode m :
       {SyntheticMode::Articulating, SyntheticMode::Static, SyntheticMode::HeldExpression})
    if (to_string(m) == name) return m;
  return std::nullopt;
}

void validate(const SyntheticSpec& spec) {
  auto fail = [](const std::string& msg) { throw Error(Errc::InvalidSpec, msg); };
  if (spec.frames == 0) fail("frames must be >= 1");
  if (spec.dims.head == 0 || spec.dims.eye == 0 || spec.dims.emo == 0 || spec.dims.lip == 0)
    fail("every stream dimension must be >= 1");
  if (!(std::isfinite(spec.fps) && spec.fps > 0.0)) fail("fps must be positive");
  if (!(std::isfinite(spec.noise_scale) && spec.noise_scale >= 0.0)) fail("noise_scale must be >= 0");
  if (!(std::isfinite(spec.oscillation_amplitude) && spec.oscillation_amplitude >= 0.0))
    fail("oscillation_amplitude must be >= 0");
  if (spec.oscillation_period_frames == 0) fail("oscillation_period_frames must be >= 1");
  if (spec.mode == SyntheticMode::Articulating && !(spec.noise_scale < spec.oscillation_amplitude))
    fail("articulating mode requires noise_scale < oscillation_amplitude");
  if (spec.mode == SyntheticMode::HeldExpression) {
    if (spec.burst_frames == 0 || spec.burst_frames > spec.frames)
      fail("burst_frames must be in 1..frames");
    if (!(std::isfinite(spec.burst_amplitude) && spec.burst_amplitude >= 0.0))
      fail("burst_amplitude must be >= 0");
  }
}

namespace {

constexpr std::array<std::string_view, 5> kMacroLabels = {"happiness", "sadness", "anger",
                                                          "surprise", "neutral"};
constexpr std::array<std::string_view, 4> kMicroLabels = {"contempt", "fear", "disgust",
                                                          "surprise"};

// Constant base vector in [-1, 1) plus i.i.d. Gaussian noise per entry.
nn::Matrix noisy_constant(std::size_t frames, std::size_t dim, double noise, nn::Rng& rng) {
  nn::Matrix m(frames, dim);
  std::vector<double> base(dim);
  for (double& b : base) b = rng.uniform(-1.0, 1.0);
  for (std::size_t t = 0; t < frames; ++t)
    for (std::size_t d = 0; d < dim; ++d) m(t, d) = base[d] + noise * rng.normal();
  return m;
}

// Slow single-period drift of small amplitude; stands in for head pose and gaze.
nn::Matrix slow_drift(std::size_t frames, std::size_t dim, double noise, nn::Rng& rng) {
  nn::Matrix m = noisy_constant(frames, dim, noise, rng);
  const double period = static_cast<double>(std::max<std::size_t>(frames, 2));
  for (std::size_t d = 0; d < dim; ++d) {
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    for (std::size_t t = 0; t < frames; ++t)
      m(t, d) += 0.05 * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period + phase);
  }
  return m;
}

std::string reference_text(std::string_view macro, std::string_view micro) {
  std::string s = "The person displays ";
  s += macro;
  s += " overall, with a relaxed brow and a steady head. A fleeting flash of ";
  s += micro;
  s += " appears briefly around the eyes and mouth, which suggests inner conflict because the "
       "expression is suppressed as soon as it surfaces.";
  return s;
}

}  // namespace

std::pair<FacialDynamics, Annotation> generate_synthetic(const SyntheticSpec& spec) {
  validate(spec);
  nn::Rng root(spec.seed);
  nn::Rng head_rng = root.fork(0);
  nn::Rng eye_rng = root.fork(1);
  nn::Rng emo_rng = root.fork(2);
  nn::Rng lip_rng = root.fork(3);
  nn::Rng label_rng = root.fork(4);

  const std::size_t T = spec.frames;
  nn::Matrix head = slow_drift(T, spec.dims.head, spec.noise_scale, head_rng);
  nn::Matrix eye = slow_drift(T, spec.dims.eye, spec.noise_scale, eye_rng);
  nn::Matrix emo = noisy_constant(T, spec.dims.emo, spec.noise_scale, emo_rng);

  nn::Matrix lip;
  if (spec.mode == SyntheticMode::Articulating) {
    lip = nn::Matrix(T, spec.dims.lip);
    const double omega = 2.0 * std::numbers::pi / static_cast<double>(spec.oscillation_period_frames);
    for (std::size_t d = 0; d < spec.dims.lip; ++d) {
      const double base = lip_rng.uniform(-1.0, 1.0);
      const double phase = lip_rng.uniform(0.0, 2.0 * std::numbers::pi);
      for (std::size_t t = 0; t < T; ++t) {
        lip(t, d) = base + spec.oscillation_amplitude * std::sin(omega * static_cast<double>(t) + phase) +
                    spec.noise_scale * lip_rng.normal();
      }
    }
  } else {
    lip = noisy_constant(T, spec.dims.lip, spec.noise_scale, lip_rng);
  }

  Annotation ann;
  ann.clip_id = spec.clip_id;
  ann.macro_label = std::string(kMacroLabels[label_rng.next_u64() % kMacroLabels.size()]);
  ann.micro_label = std::string(kMicroLabels[label_rng.next_u64() % kMicroLabels.size()]);

  if (spec.mode == SyntheticMode::HeldExpression) {
    const std::size_t span = spec.burst_frames;
    const std::size_t start = static_cast<std::size_t>(label_rng.next_u64() % (T - span + 1));
    std::vector<double> direction(spec.dims.emo);
    for (double& v : direction) v = emo_rng.uniform(-1.0, 1.0);
    for (std::size_t k = 0; k < span; ++k) {
      // Raised-cosine envelope peaking mid-burst; never zero inside the segment.
      const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k + 1) /
                                             static_cast<double>(span + 1));
      for (std::size_t d = 0; d < spec.dims.emo; ++d)
        emo(start + k, d) += spec.burst_amplitude * w * direction[d];
    }
    ann.micro_segments.push_back({start, start + span - 1});
  }
  ann.reference_analysis = reference_text(ann.macro_label, ann.micro_label);

  FacialDynamics dyn{spec.clip_id, FeatureStream::from_matrix(StreamKind::Head, head, spec.fps),
                     FeatureStream::from_matrix(StreamKind::Eye, eye, spec.fps),
                     FeatureStream::from_matrix(StreamKind::Emo, emo, spec.fps),
                     FeatureStream::from_matrix(StreamKind::Lip, lip, spec.fps)};
  return {std::move(dyn), std::move(ann)};
}

}  // namespace mind
