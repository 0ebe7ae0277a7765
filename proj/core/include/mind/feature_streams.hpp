// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mind/nn/matrix.hpp"

namespace mind {

enum class StreamKind { Head, Eye, Emo, Lip };

std::string_view to_string(StreamKind kind) noexcept;
std::optional<StreamKind> parse_stream_kind(std::string_view name) noexcept;

// One facial channel: T frames of D features, stored as the 32-bit values
// that appear on disk. Arithmetic consumers promote through to_matrix().
class FeatureStream {
 public:
  // Throws DimensionMismatch on bad shape, NonFiniteValue on NaN/Inf,
  // InvalidSpec on non-positive fps.
  FeatureStream(StreamKind kind, std::size_t frames, std::size_t dim, double fps,
                std::vector<float> values);

  static FeatureStream from_matrix(StreamKind kind, const nn::Matrix& m, double fps);
  static FeatureStream zeros(StreamKind kind, std::size_t frames, std::size_t dim, double fps);

  StreamKind kind() const noexcept { return kind_; }
  std::size_t frames() const noexcept { return frames_; }
  std::size_t dim() const noexcept { return dim_; }
  double fps() const noexcept { return fps_; }

  float at(std::size_t t, std::size_t d) const noexcept { return values_[t * dim_ + d]; }
  std::span<const float> frame(std::size_t t) const noexcept {
    return {values_.data() + t * dim_, dim_};
  }
  std::span<const float> values() const noexcept { return values_; }

  nn::Matrix to_matrix() const;

  // Bitwise comparison of every stored value plus metadata.
  bool bit_equal(const FeatureStream& other) const noexcept;

 private:
  StreamKind kind_;
  std::size_t frames_;
  std::size_t dim_;
  double fps_;
  std::vector<float> values_;
};

struct FacialDynamics {
  std::string clip_id;
  FeatureStream head;
  FeatureStream eye;
  FeatureStream emo;
  FeatureStream lip;

  std::size_t frames() const noexcept { return head.frames(); }
  double fps() const noexcept { return head.fps(); }
  std::size_t total_dim() const noexcept {
    return head.dim() + eye.dim() + emo.dim() + lip.dim();
  }
  bool bit_equal(const FacialDynamics& other) const noexcept;
};

// Throws DimensionMismatch when streams disagree on T or fps, or a stream
// sits in the wrong slot.
void validate(const FacialDynamics& dyn);

// Inclusive frame range of one micro-expression event.
struct MicroSegment {
  std::size_t t_start = 0;
  std::size_t t_end = 0;
  bool operator==(const MicroSegment&) const = default;
};

struct Annotation {
  std::string clip_id;
  std::vector<MicroSegment> micro_segments;
  std::string micro_label;
  std::string macro_label;
  std::optional<std::string> reference_analysis;
  bool operator==(const Annotation&) const = default;
};

// Throws SegmentOutOfBounds unless 0 <= t_start <= t_end < frames for every segment.
void validate(const Annotation& ann, std::size_t frames);

// --- binary container -------------------------------------------------------

inline constexpr std::string_view kContainerMagic = "MINDFS1\n";

std::string encode_container(const FacialDynamics& dyn);
FacialDynamics decode_container(const std::string& bytes);

void write_container(const FacialDynamics& dyn, const std::filesystem::path& path);
FacialDynamics read_container(const std::filesystem::path& path);

// --- plain-text fixtures ----------------------------------------------------

// T lines of D comma-separated numbers.
FeatureStream read_stream_csv(const std::filesystem::path& path, StreamKind kind, double fps);
// Reads head.csv, eye.csv, emo.csv, lip.csv from one directory.
FacialDynamics read_dynamics_csv(const std::filesystem::path& dir, std::string clip_id, double fps);

// --- annotation document ----------------------------------------------------

// JSON array with one object per clip; fields as in Annotation, segments as
// {"t_start":..,"t_end":..}. Output is sorted by clip_id.
std::string encode_annotations(std::vector<Annotation> annotations);
std::vector<Annotation> decode_annotations(const std::string& text);

void write_annotations(const std::vector<Annotation>& annotations, const std::filesystem::path& path);
std::vector<Annotation> read_annotations(const std::filesystem::path& path);

// --- synthetic generation ---------------------------------------------------

enum class SyntheticMode { Articulating, Static, HeldExpression };

std::string_view to_string(SyntheticMode mode) noexcept;
std::optional<SyntheticMode> parse_synthetic_mode(std::string_view name) noexcept;

struct StreamDims {
  std::size_t head = 6;
  std::size_t eye = 6;
  std::size_t emo = 30;
  std::size_t lip = 512;

  std::size_t total() const noexcept { return head + eye + emo + lip; }
  bool operator==(const StreamDims&) const = default;
};

struct SyntheticSpec {
  SyntheticMode mode = SyntheticMode::Articulating;
  std::size_t frames = 64;
  StreamDims dims;
  double fps = 25.0;
  double noise_scale = 0.01;
  double oscillation_amplitude = 1.0;
  std::size_t oscillation_period_frames = 8;
  // Held-expression burst placed in the emo stream.
  std::size_t burst_frames = 4;
  double burst_amplitude = 1.0;
  std::uint64_t seed = 0;
  std::string clip_id = "synthetic";
};

// Throws InvalidSpec.
void validate(const SyntheticSpec& spec);

// Articulating: lip is a per-dimension phase-shifted sinusoid plus Gaussian
// noise. Static and HeldExpression: lip is a constant vector plus noise.
// HeldExpression also adds a raised-cosine burst to the emo stream and
// records it as the single micro segment.
std::pair<FacialDynamics, Annotation> generate_synthetic(const SyntheticSpec& spec);

}  // namespace mind
