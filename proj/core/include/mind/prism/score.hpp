// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mind::prism {

// Display order follows the benchmark tables: Mac, Mic, PIRD, DCR.
enum class Dimension { Mac, Mic, Pird, Dcr };

inline constexpr std::array<Dimension, 4> kDimensions = {Dimension::Mac, Dimension::Mic,
                                                         Dimension::Pird, Dimension::Dcr};

std::string_view to_string(Dimension d) noexcept;  // "mac", "mic", "pird", "dcr"
std::string_view title(Dimension d) noexcept;      // "Mac", "Mic", "PIRD", "DCR"
double cap(Dimension d) noexcept;

inline constexpr double kMicCap = 1.25;
inline constexpr double kMacCap = 1.5;
inline constexpr double kPirdCap = 1.25;
inline constexpr double kDcrCap = 1.0;
inline constexpr double kTotalCap = kMicCap + kMacCap + kPirdCap + kDcrCap;

// Four dimension values exactly as a judge returned them.
struct RawScores {
  double mac = 0.0;
  double mic = 0.0;
  double pird = 0.0;
  double dcr = 0.0;

  double get(Dimension d) const noexcept;
  void set(Dimension d, double v) noexcept;
};

struct ClampEvent {
  Dimension dimension;
  double raw;
  double clamped;
};

// Per-dimension scores inside [0, cap]. Only constructible through ingest().
class PrismScore {
 public:
  PrismScore() = default;

  double mac() const noexcept { return v_.mac; }
  double mic() const noexcept { return v_.mic; }
  double pird() const noexcept { return v_.pird; }
  double dcr() const noexcept { return v_.dcr; }
  double get(Dimension d) const noexcept { return v_.get(d); }
  double total() const noexcept { return v_.mac + v_.mic + v_.pird + v_.dcr; }

  // Clamps each dimension into [0, cap] and appends one event per clamped
  // value. Throws MalformedReply for NaN/Inf; those are never coerced.
  friend PrismScore ingest(const RawScores& raw, std::vector<ClampEvent>* events);

 private:
  RawScores v_;
};

PrismScore ingest(const RawScores& raw, std::vector<ClampEvent>* events = nullptr);

struct DimensionMeans {
  double mac = 0.0;
  double mic = 0.0;
  double pird = 0.0;
  double dcr = 0.0;

  double get(Dimension d) const noexcept;
  void set(Dimension d, double v) noexcept;
  // Final score: the sum of the four dimension means.
  double total() const noexcept { return mac + mic + pird + dcr; }
};

// Arithmetic means per dimension. Throws EmptyInput.
DimensionMeans aggregate(std::span<const PrismScore> scores);

// (other − base) / base, in percent. Throws DivisionByZeroBase for base <= 0.
double improvement_percent(double base, double other);

struct Improvement {
  Dimension dimension;
  std::optional<double> percent;  // empty when the base is not positive

  // "+23.5%" style, one decimal; "n/a" without a positive base.
  std::string text() const;
};

std::array<Improvement, 4> improvement_table(const DimensionMeans& base, const DimensionMeans& other);

// Fixed three-decimal rendering used in reports ("2.562").
std::string format_score(double v);

}  // namespace mind::prism
