// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mind/nn/checkpoint.hpp"

#include <json.hpp>

#include "binary_io.hpp"
#include "mind/error.hpp"

namespace mind::nn {

using nlohmann::json;

std::string encode_checkpoint(const std::vector<NamedTensor>& tensors) {
  json header;
  header["dtype"] = "f64le";
  header["tensors"] = json::array();
  std::string payload;
  for (const auto& t : tensors) {
    header["tensors"].push_back({{"name", t.name}, {"rows", t.values.rows()},
                                 {"cols", t.values.cols()}});
    for (double v : t.values.data()) detail::put_f64(payload, v);
  }
  std::string out = detail::frame(kCheckpointMagic, header.dump());
  out += payload;
  return out;
}

std::vector<NamedTensor> decode_checkpoint(const std::string& bytes) {
  const detail::Frame f = detail::unframe(kCheckpointMagic, bytes);
  json header;
  try {
    header = json::parse(f.header);
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedHeader, std::string("checkpoint header: ") + e.what());
  }
  if (header.value("dtype", "") != "f64le" || !header.contains("tensors") ||
      !header["tensors"].is_array()) {
    throw Error(Errc::MalformedHeader, "checkpoint header missing dtype/tensors");
  }
  std::vector<NamedTensor> out;
  std::size_t offset = 0;
  const auto* base = reinterpret_cast<const unsigned char*>(f.payload.data());
  for (const auto& entry : header["tensors"]) {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::string name;
    try {
      name = entry.at("name").get<std::string>();
      rows = entry.at("rows").get<std::size_t>();
      cols = entry.at("cols").get<std::size_t>();
    } catch (const json::exception& e) {
      throw Error(Errc::MalformedHeader, std::string("checkpoint tensor entry: ") + e.what());
    }
    const std::size_t count = rows * cols;
    if ((f.payload.size() - offset) / 8 < count) {
      throw Error(Errc::MalformedHeader, "checkpoint payload truncated at " + name);
    }
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) values[i] = detail::get_f64(base + offset + 8 * i);
    offset += 8 * count;
    out.push_back({std::move(name), Matrix(rows, cols, std::move(values))});
  }
  if (offset != f.payload.size()) throw Error(Errc::MalformedHeader, "trailing checkpoint bytes");
  return out;
}

void write_checkpoint(const std::vector<NamedTensor>& tensors, const std::filesystem::path& path) {
  detail::write_file_atomic(path, encode_checkpoint(tensors));
}

std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(detail::read_file(path));
}

std::vector<NamedTensor> snapshot(const std::vector<TensorRef>& refs) {
  std::vector<NamedTensor> out;
  out.reserve(refs.size());
  for (const auto& r : refs) {
    out.push_back({r.name, Matrix(r.rows, r.cols, std::vector<double>(r.values.begin(),
                                                                      r.values.end()))});
  }
  return out;
}

void restore(const std::vector<TensorRef>& refs, const std::vector<NamedTensor>& tensors) {
  if (refs.size() != tensors.size()) {
    throw Error(Errc::ShapeMismatch, "checkpoint holds " + std::to_string(tensors.size()) +
                                         " tensors, model expects " + std::to_string(refs.size()));
  }
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const auto& r = refs[i];
    const auto& t = tensors[i];
    if (r.name != t.name || r.rows != t.values.rows() || r.cols != t.values.cols()) {
      throw Error(Errc::ShapeMismatch, "checkpoint tensor " + t.name + " does not match " + r.name);
    }
    auto src = t.values.data();
    std::copy(src.begin(), src.end(), r.values.begin());
  }
}

}  // namespace mind::nn
