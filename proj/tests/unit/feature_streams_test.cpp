// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>

#include <gtest/gtest.h>
#include <json.hpp>

#include "mind/error.hpp"
#include "mind/feature_streams.hpp"
#include "mind/nn/rng.hpp"
#include "mind/status_judgment.hpp"
#include "support/oracles.hpp"

namespace mind {
namespace {

namespace fs = std::filesystem;

template <typename Fn>
Errc error_code(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no mind::Error thrown";
  return Errc::IoFailure;
}

FacialDynamics random_dynamics(std::size_t T, const StreamDims& dims, std::uint64_t seed) {
  nn::Rng rng(seed);
  return FacialDynamics{"clip_" + std::to_string(seed),
                        testing::random_stream(StreamKind::Head, T, dims.head, rng),
                        testing::random_stream(StreamKind::Eye, T, dims.eye, rng),
                        testing::random_stream(StreamKind::Emo, T, dims.emo, rng),
                        testing::random_stream(StreamKind::Lip, T, dims.lip, rng)};
}

std::uint32_t read_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

TEST(FeatureStreamTest, RejectsWrongValueCount) {
  EXPECT_EQ(error_code([] { FeatureStream(StreamKind::Lip, 3, 2, 25.0, std::vector<float>(5)); }),
            Errc::DimensionMismatch);
  EXPECT_EQ(error_code([] { FeatureStream(StreamKind::Lip, 0, 2, 25.0, {}); }),
            Errc::DimensionMismatch);
}

TEST(FeatureStreamTest, RejectsNonFinite) {
  std::vector<float> v = {0.0f, std::numeric_limits<float>::quiet_NaN()};
  EXPECT_EQ(error_code([&] { FeatureStream(StreamKind::Emo, 1, 2, 25.0, v); }),
            Errc::NonFiniteValue);
  v[1] = std::numeric_limits<float>::infinity();
  EXPECT_EQ(error_code([&] { FeatureStream(StreamKind::Emo, 1, 2, 25.0, v); }),
            Errc::NonFiniteValue);
}

TEST(FeatureStreamTest, RejectsBadFps) {
  EXPECT_EQ(error_code([] { FeatureStream::zeros(StreamKind::Head, 2, 2, 0.0); }), Errc::InvalidSpec);
}

TEST(FacialDynamicsTest, FrameCountMismatchIsRejected) {
  FacialDynamics dyn{"x", FeatureStream::zeros(StreamKind::Head, 4, 2, 25.0),
                     FeatureStream::zeros(StreamKind::Eye, 4, 2, 25.0),
                     FeatureStream::zeros(StreamKind::Emo, 3, 2, 25.0),
                     FeatureStream::zeros(StreamKind::Lip, 4, 2, 25.0)};
  EXPECT_EQ(error_code([&] { validate(dyn); }), Errc::DimensionMismatch);
  EXPECT_EQ(error_code([&] { encode_container(dyn); }), Errc::DimensionMismatch);
}

TEST(ContainerTest, RoundTripIsBitExact) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto dyn = random_dynamics(1 + seed % 7, {3, 2, 5, 9}, seed);
    const auto back = decode_container(encode_container(dyn));
    EXPECT_TRUE(back.bit_equal(dyn)) << "seed " << seed;
    EXPECT_EQ(back.clip_id, dyn.clip_id);
  }
}

TEST(ContainerTest, EncodingIsDeterministic) {
  const auto dyn = random_dynamics(5, {2, 2, 2, 2}, 3);
  EXPECT_EQ(encode_container(dyn), encode_container(dyn));
}

TEST(ContainerTest, EmptyClipIdRoundTrips) {
  auto dyn = random_dynamics(2, {1, 1, 1, 1}, 9);
  dyn.clip_id.clear();
  EXPECT_EQ(decode_container(encode_container(dyn)).clip_id, "");
}

TEST(ContainerTest, LayoutMatchesIndependentParse) {
  const StreamDims dims;  // 6/6/30/512
  const auto dyn = random_dynamics(16, dims, 1);
  const std::string bytes = encode_container(dyn);

  ASSERT_GE(bytes.size(), 12u);
  EXPECT_EQ(bytes.substr(0, 8), "MINDFS1\n");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint32_t header_len = read_u32_le(p + 8);
  const auto header = nlohmann::json::parse(bytes.substr(12, header_len));
  EXPECT_EQ(header["clip_id"], dyn.clip_id);
  ASSERT_EQ(header["streams"].size(), 4u);
  const std::size_t want_dims[] = {6, 6, 30, 512};
  const char* want_kinds[] = {"head", "eye", "emo", "lip"};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(header["streams"][i]["kind"], want_kinds[i]);
    EXPECT_EQ(header["streams"][i]["T"], 16);
    EXPECT_EQ(header["streams"][i]["D"], want_dims[i]);
  }
  EXPECT_EQ(bytes.size(), 12u + header_len + 4u * 16u * dims.total());

  // First payload float is head[0][0], little-endian.
  const std::uint32_t bits = read_u32_le(p + 12 + header_len);
  EXPECT_EQ(std::bit_cast<float>(bits), dyn.head.at(0, 0));
  // Last payload float is lip[T-1][D-1].
  const std::uint32_t last = read_u32_le(p + bytes.size() - 4);
  EXPECT_EQ(std::bit_cast<float>(last), dyn.lip.at(15, 511));
}

TEST(ContainerTest, CorruptInputsAreMalformed) {
  const std::string good = encode_container(random_dynamics(3, {1, 2, 3, 4}, 2));
  EXPECT_EQ(error_code([&] { decode_container("MINDFS2\n" + good.substr(8)); }), Errc::MalformedHeader);
  EXPECT_EQ(error_code([&] { decode_container(good.substr(0, good.size() - 1)); }),
            Errc::MalformedHeader);
  EXPECT_EQ(error_code([&] { decode_container(good + "x"); }), Errc::MalformedHeader);
  EXPECT_EQ(error_code([&] { decode_container(good.substr(0, 10)); }), Errc::MalformedHeader);
  std::string bad_json = good;
  bad_json[12] = '[';
  EXPECT_EQ(error_code([&] { decode_container(bad_json); }), Errc::MalformedHeader);
}

TEST(ContainerTest, MissingFileIsIoFailure) {
  EXPECT_EQ(error_code([] { read_container("/nonexistent/dir/clip.mindfs"); }), Errc::IoFailure);
}

TEST(ContainerTest, FileRoundTrip) {
  const fs::path dir = fs::temp_directory_path() / "mind_fs_test";
  fs::create_directories(dir);
  const auto dyn = random_dynamics(4, {2, 2, 2, 3}, 11);
  write_container(dyn, dir / "a.mindfs");
  EXPECT_TRUE(read_container(dir / "a.mindfs").bit_equal(dyn));
  fs::remove_all(dir);
}

TEST(CsvTest, FixtureLoads) {
  const auto dyn = read_dynamics_csv(fs::path(MIND_FIXTURE_DIR) / "clip_csv", "fixture_clip", 30.0);
  EXPECT_EQ(dyn.frames(), 3u);
  EXPECT_EQ(dyn.head.dim(), 2u);
  EXPECT_EQ(dyn.emo.dim(), 3u);
  EXPECT_EQ(dyn.lip.dim(), 1u);
  EXPECT_FLOAT_EQ(dyn.emo.at(2, 2), 6.0f);
  EXPECT_FLOAT_EQ(dyn.lip.at(1, 0), 1.0f);
  EXPECT_DOUBLE_EQ(dyn.fps(), 30.0);
}

TEST(AnnotationTest, RoundTripAndBounds) {
  const auto anns = read_annotations(fs::path(MIND_FIXTURE_DIR) / "annotations.json");
  ASSERT_EQ(anns.size(), 1u);
  EXPECT_EQ(anns[0].micro_segments[0], (MicroSegment{1, 2}));
  EXPECT_EQ(decode_annotations(encode_annotations(anns)), anns);
  EXPECT_NO_THROW(validate(anns[0], 3));
  EXPECT_EQ(error_code([&] { validate(anns[0], 2); }), Errc::SegmentOutOfBounds);
  Annotation reversed = anns[0];
  reversed.micro_segments = {{2, 1}};
  EXPECT_EQ(error_code([&] { validate(reversed, 10); }), Errc::SegmentOutOfBounds);
}

TEST(SyntheticTest, SameSeedIsBitIdentical) {
  for (auto mode : {SyntheticMode::Articulating, SyntheticMode::Static, SyntheticMode::HeldExpression}) {
    SyntheticSpec spec;
    spec.mode = mode;
    spec.seed = 77;
    const auto a = generate_synthetic(spec);
    const auto b = generate_synthetic(spec);
    EXPECT_TRUE(a.first.bit_equal(b.first));
    EXPECT_EQ(a.second, b.second);
    spec.seed = 78;
    EXPECT_FALSE(generate_synthetic(spec).first.bit_equal(a.first));
  }
}

TEST(SyntheticTest, ZeroNoiseStaticIsConstant) {
  SyntheticSpec spec;
  spec.mode = SyntheticMode::Static;
  spec.noise_scale = 0.0;
  const auto [dyn, ann] = generate_synthetic(spec);
  const auto stats = compute_statistics(dyn.lip);
  EXPECT_EQ(stats.v_var, 0.0);
  EXPECT_EQ(stats.v_sad, 0.0);
  EXPECT_TRUE(ann.micro_segments.empty());
}

TEST(SyntheticTest, ZeroNoiseArticulatingIsExactSinusoid) {
  SyntheticSpec spec;
  spec.noise_scale = 0.0;
  spec.frames = 16;
  spec.oscillation_period_frames = 8;
  const auto [dyn, ann] = generate_synthetic(spec);
  // sin(ωt+φ) has period 8: rows t and t+8 agree to float rounding.
  for (std::size_t d = 0; d < dyn.lip.dim(); ++d)
    EXPECT_NEAR(dyn.lip.at(0, d), dyn.lip.at(8, d), 1e-6);
}

TEST(SyntheticTest, HeldExpressionSegmentIsInsideClipAndVisible) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SyntheticSpec spec;
    spec.mode = SyntheticMode::HeldExpression;
    spec.noise_scale = 0.0;
    spec.seed = seed;
    const auto [dyn, ann] = generate_synthetic(spec);
    ASSERT_EQ(ann.micro_segments.size(), 1u);
    const auto seg = ann.micro_segments[0];
    EXPECT_EQ(seg.t_end - seg.t_start + 1, spec.burst_frames);
    EXPECT_NO_THROW(validate(ann, dyn.frames()));
    // With zero noise every frame outside the burst repeats the same row.
    const std::size_t outside = seg.t_start == 0 ? dyn.frames() - 1 : 0;
    for (std::size_t t = 0; t < dyn.frames(); ++t) {
      if (t >= seg.t_start && t <= seg.t_end) continue;
      for (std::size_t d = 0; d < dyn.emo.dim(); ++d) EXPECT_EQ(dyn.emo.at(t, d), dyn.emo.at(outside, d));
    }
    double diff = 0.0;
    for (std::size_t d = 0; d < dyn.emo.dim(); ++d)
      diff += std::abs(dyn.emo.at(seg.t_start, d) - dyn.emo.at(outside, d));
    EXPECT_GT(diff, 0.0);
  }
}

TEST(SyntheticTest, InvalidSpecs) {
  SyntheticSpec spec;
  spec.noise_scale = 2.0;  // not below the amplitude
  EXPECT_EQ(error_code([&] { generate_synthetic(spec); }), Errc::InvalidSpec);
  spec = {};
  spec.frames = 0;
  EXPECT_EQ(error_code([&] { generate_synthetic(spec); }), Errc::InvalidSpec);
  spec = {};
  spec.oscillation_period_frames = 0;
  EXPECT_EQ(error_code([&] { generate_synthetic(spec); }), Errc::InvalidSpec);
  spec = {};
  spec.mode = SyntheticMode::HeldExpression;
  spec.burst_frames = spec.frames + 1;
  EXPECT_EQ(error_code([&] { generate_synthetic(spec); }), Errc::InvalidSpec);
}

TEST(SyntheticTest, ModesSeparateOverManySeeds) {
  double max_static = 0.0;
  double min_articulating = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    SyntheticSpec spec;
    spec.seed = seed;
    spec.mode = SyntheticMode::Static;
    max_static = std::max(max_static, judge(generate_synthetic(spec).first.lip, {}).score);
    spec.mode = SyntheticMode::Articulating;
    min_articulating = std::min(min_articulating, judge(generate_synthetic(spec).first.lip, {}).score);
  }
  EXPECT_LT(max_static, min_articulating);
}

}  // namespace
}  // namespace mind
