// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#include "binary_io.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "mind/error.hpp"

namespace mind {

namespace detail {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(Errc::IoFailure, "read failed for " + path.string());
  return std::move(ss).str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  static std::atomic<unsigned> counter{0};
  auto tmp = path;
  tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()) % 100000) +
         "_" + std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoFailure, "cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(Errc::IoFailure, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(Errc::IoFailure, "cannot rename onto " + path.string());
  }
}

std::string frame(std::string_view magic, std::string_view header) {
  std::string out(magic);
  put_u32(out, static_cast<std::uint32_t>(header.size()));
  out.append(header);
  return out;
}

Frame unframe(std::string_view magic, const std::string& bytes) {
  if (bytes.size() < magic.size() + 4 || std::string_view(bytes).substr(0, magic.size()) != magic) {
    throw Error(Errc::MalformedHeader, "bad magic");
  }
  const auto* base = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint32_t header_len = get_u32(base + magic.size());
  const std::size_t header_off = magic.size() + 4;
  if (bytes.size() - header_off < header_len) {
    throw Error(Errc::MalformedHeader, "header length exceeds file size");
  }
  Frame f;
  f.header = bytes.substr(header_off, header_len);
  f.payload = std::string_view(bytes).substr(header_off + header_len);
  return f;
}

}  // namespace detail

}  // namespace mind
