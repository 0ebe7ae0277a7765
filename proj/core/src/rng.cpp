// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mind/nn/rng.hpp"

#include <cmath>
#include <numbers>

namespace mind::nn {

namespace {

// splitmix64 finalizer, used only to decorrelate forked seeds.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double Rng::normal() {
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Rng Rng::fork(std::uint64_t stream) { return Rng(mix(next_u64() ^ mix(stream))); }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix(mix(seed) ^ (index * 0xd1b54a32d192ed03ULL));
}

}  // namespace mind::nn
