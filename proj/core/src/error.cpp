// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mind/error.hpp"

namespace mind {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::IoFailure: return "IoFailure";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::InvalidShape: return "InvalidShape";
    case Errc::SegmentOutOfBounds: return "SegmentOutOfBounds";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::DivisionByZeroBase: return "DivisionByZeroBase";
    case Errc::Timeout: return "Timeout";
    case Errc::AuthFailure: return "AuthFailure";
    case Errc::MalformedReply: return "MalformedReply";
    case Errc::TransportFailure: return "TransportFailure";
    case Errc::MissingAnnotation: return "MissingAnnotation";
    case Errc::MissingCheckpoint: return "MissingCheckpoint";
    case Errc::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace mind
