// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mind {

enum class Errc {
  MalformedHeader,
  DimensionMismatch,
  NonFiniteValue,
  IoFailure,
  InvalidSpec,
  ShapeMismatch,
  InvalidShape,
  SegmentOutOfBounds,
  EmptyInput,
  DivisionByZeroBase,
  Timeout,
  AuthFailure,
  MalformedReply,
  TransportFailure,
  MissingAnnotation,
  MissingCheckpoint,
  ConfigError,
};

std::string_view to_string(Errc code) noexcept;

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace mind
