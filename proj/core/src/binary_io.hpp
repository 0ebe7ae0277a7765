// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

// Little-endian primitives and the framed-container layout shared by feature
// containers and parameter checkpoints:
//   magic (8 bytes) | u32 LE header length | UTF-8 JSON header | payload

#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace mind::detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

inline void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }
inline void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

inline std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

inline float get_f32(const unsigned char* p) { return std::bit_cast<float>(get_u32(p)); }
inline double get_f64(const unsigned char* p) { return std::bit_cast<double>(get_u64(p)); }

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary and renames over the destination.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

struct Frame {
  std::string header;
  std::string_view payload;
};

std::string frame(std::string_view magic, std::string_view header);
// Splits a framed buffer; throws MalformedHeader on bad magic or truncation.
Frame unframe(std::string_view magic, const std::string& bytes);

}  // namespace mind::detail
