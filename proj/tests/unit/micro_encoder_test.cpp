// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "mind/error.hpp"
#include "mind/micro_encoder.hpp"
#include "mind/status_judgment.hpp"
#include "support/oracles.hpp"

namespace mind {
namespace {

using testing::random_stream;

FacialDynamics small_clip(std::size_t T, std::uint64_t seed) {
  nn::Rng rng(seed);
  return FacialDynamics{"m", random_stream(StreamKind::Head, T, 2, rng),
                        random_stream(StreamKind::Eye, T, 2, rng),
                        random_stream(StreamKind::Emo, T, 3, rng),
                        random_stream(StreamKind::Lip, T, 4, rng)};
}

TEST(ExtractSegmentTest, SingleFrameIsConcatenatedRow) {
  const auto dyn = small_clip(6, 1);
  const nn::Matrix seg = extract_segment(dyn, dyn.lip, {3, 3});
  ASSERT_EQ(seg.rows(), 1u);
  ASSERT_EQ(seg.cols(), 11u);
  EXPECT_EQ(seg(0, 0), dyn.head.at(3, 0));
  EXPECT_EQ(seg(0, 2), dyn.eye.at(3, 0));
  EXPECT_EQ(seg(0, 4), dyn.emo.at(3, 0));
  EXPECT_EQ(seg(0, 7), dyn.lip.at(3, 0));
  EXPECT_EQ(seg(0, 10), dyn.lip.at(3, 3));
}

TEST(ExtractSegmentTest, WholeClip) {
  const auto dyn = small_clip(5, 2);
  const nn::Matrix seg = extract_segment(dyn, dyn.lip, {0, 4});
  EXPECT_EQ(seg.rows(), 5u);
  EXPECT_EQ(seg(4, 6), dyn.emo.at(4, 2));
}

TEST(ExtractSegmentTest, PurifiedLipColumnsAreZero) {
  const auto dyn = small_clip(5, 3);
  StatusConfig cfg;
  cfg.tau = -1.0;  // force c = 1
  const auto pur = purify(dyn.lip, judge(dyn.lip, cfg));
  const nn::Matrix seg = extract_segment(dyn, pur, {1, 3});
  for (std::size_t t = 0; t < seg.rows(); ++t) {
    for (std::size_t j = 7; j < 11; ++j) EXPECT_EQ(seg(t, j), 0.0);
    EXPECT_EQ(seg(t, 4), dyn.emo.at(1 + t, 0));
  }
}

TEST(ExtractSegmentTest, OutOfBoundsAndMismatch) {
  const auto dyn = small_clip(4, 4);
  for (MicroSegment bad : {MicroSegment{0, 4}, MicroSegment{3, 2}}) {
    try {
      extract_segment(dyn, dyn.lip, bad);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::SegmentOutOfBounds);
    }
  }
  const auto wrong = FeatureStream::zeros(StreamKind::Lip, 4, 3, 25.0);
  EXPECT_THROW(extract_segment(dyn, wrong, {0, 1}), Error);
}

TEST(EncodeMicroTest, EmptyListGivesBias) {
  nn::Rng rng(5);
  const auto w = nn::init_linear(11, 3, rng);
  EXPECT_EQ(encode_micro({}, w).values, w.bias);
}

TEST(EncodeMicroTest, SingleSegmentIsLinearOfMean) {
  nn::Rng rng(6);
  const auto w = nn::init_linear(3, 2, rng);
  const nn::Matrix seg(2, 3, std::vector<double>{1, 2, 3, 3, 4, 5});
  const auto f = encode_micro(std::span(&seg, 1), w);
  for (std::size_t o = 0; o < 2; ++o) {
    const double want = w.bias[o] + w.weight(o, 0) * 2 + w.weight(o, 1) * 3 + w.weight(o, 2) * 4;
    EXPECT_NEAR(f.values[o], want, 1e-14);
  }
}

TEST(EncodeMicroTest, TwoSegmentsAverageTheirMeans) {
  nn::Rng rng(7);
  const auto w = nn::init_linear(2, 2, rng);
  // Means (1, 1) and (3, 5): unequal lengths must not weight by frame count.
  const std::vector<nn::Matrix> segs = {nn::Matrix(1, 2, 1.0),
                                        nn::Matrix(3, 2, std::vector<double>{3, 5, 3, 5, 3, 5})};
  const auto f = encode_micro(segs, w);
  const double x[2] = {2.0, 3.0};
  for (std::size_t o = 0; o < 2; ++o)
    EXPECT_NEAR(f.values[o], w.bias[o] + w.weight(o, 0) * x[0] + w.weight(o, 1) * x[1], 1e-14);
}

TEST(EncodeMicroTest, OrderOfSegmentsDoesNotMatter) {
  nn::Rng rng(8);
  const auto w = nn::init_linear(4, 3, rng);
  const std::vector<nn::Matrix> a = {testing::random_matrix(2, 4, rng), testing::random_matrix(5, 4, rng),
                                     testing::random_matrix(1, 4, rng)};
  const std::vector<nn::Matrix> b = {a[2], a[0], a[1]};
  const auto fa = encode_micro(a, w), fb = encode_micro(b, w);
  for (std::size_t o = 0; o < 3; ++o) EXPECT_NEAR(fa.values[o], fb.values[o], 1e-14);
}

TEST(EncodeMicroTest, DuplicatedSegmentIsIdempotent) {
  nn::Rng rng(9);
  const auto w = nn::init_linear(4, 3, rng);
  const std::vector<nn::Matrix> one = {testing::random_matrix(3, 4, rng)};
  const std::vector<nn::Matrix> two = {one[0], one[0]};
  const auto f1 = encode_micro(one, w), f2 = encode_micro(two, w);
  for (std::size_t o = 0; o < 3; ++o) EXPECT_NEAR(f1.values[o], f2.values[o], 1e-15);
}

TEST(EncodeMicroTest, WrongWidthIsShapeMismatch) {
  nn::Rng rng(10);
  const auto w = nn::init_linear(4, 3, rng);
  const nn::Matrix seg(2, 5);
  try {
    encode_micro(std::span(&seg, 1), w);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ShapeMismatch);
  }
}

}  // namespace
}  // namespace mind
