// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mind/nn/layers.hpp"
#include "mind/nn/matrix.hpp"

namespace mind::nn {

// Parameter checkpoint: "MINDNN1\n", u32 LE header length, JSON header
// {"dtype":"f64le","tensors":[{name,rows,cols},...]}, then each tensor as
// rows*cols little-endian doubles in header order.
inline constexpr std::string_view kCheckpointMagic = "MINDNN1\n";

struct NamedTensor {
  std::string name;
  Matrix values;
  bool operator==(const NamedTensor&) const = default;
};

std::string encode_checkpoint(const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> decode_checkpoint(const std::string& bytes);

void write_checkpoint(const std::vector<NamedTensor>& tensors, const std::filesystem::path& path);
std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path);

std::vector<NamedTensor> snapshot(const std::vector<TensorRef>& refs);
// Copies tensors into refs; names and shapes must match in order.
void restore(const std::vector<TensorRef>& refs, const std::vector<NamedTensor>& tensors);

}  // namespace mind::nn
