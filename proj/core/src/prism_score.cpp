// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mind/prism/score.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "mind/error.hpp"

namespace mind::prism {

std::string_view to_string(Dimension d) noexcept {
  switch (d) {
    case Dimension::Mac: return "mac";
    case Dimension::Mic: return "mic";
    case Dimension::Pird: return "pird";
    case Dimension::Dcr: return "dcr";
  }
  return "?";
}

std::string_view title(Dimension d) noexcept {
  switch (d) {
    case Dimension::Mac: return "Mac";
    case Dimension::Mic: return "Mic";
    case Dimension::Pird: return "PIRD";
    case Dimension::Dcr: return "DCR";
  }
  return "?";
}

double cap(Dimension d) noexcept {
  switch (d) {
    case Dimension::Mac: return kMacCap;
    case Dimension::Mic: return kMicCap;
    case Dimension::Pird: return kPirdCap;
    case Dimension::Dcr: return kDcrCap;
  }
  return 0.0;
}

double RawScores::get(Dimension d) const noexcept {
  switch (d) {
    case Dimension::Mac: return mac;
    case Dimension::Mic: return mic;
    case Dimension::Pird: return pird;
    case Dimension::Dcr: return dcr;
  }
  return 0.0;
}

void RawScores::set(Dimension d, double v) noexcept {
  switch (d) {
    case Dimension::Mac: mac = v; break;
    case Dimension::Mic: mic = v; break;
    case Dimension::Pird: pird = v; break;
    case Dimension::Dcr: dcr = v; break;
  }
}

double DimensionMeans::get(Dimension d) const noexcept {
  switch (d) {
    case Dimension::Mac: return mac;
    case Dimension::Mic: return mic;
    case Dimension::Pird: return pird;
    case Dimension::Dcr: return dcr;
  }
  return 0.0;
}

void DimensionMeans::set(Dimension d, double v) noexcept {
  switch (d) {
    case Dimension::Mac: mac = v; break;
    case Dimension::Mic: mic = v; break;
    case Dimension::Pird: pird = v; break;
    case Dimension::Dcr: dcr = v; break;
  }
}

PrismScore ingest(const RawScores& raw, std::vector<ClampEvent>* events) {
  PrismScore s;
  for (Dimension d : kDimensions) {
    const double v = raw.get(d);
    if (!std::isfinite(v)) {
      throw Error(Errc::MalformedReply, std::string(to_string(d)) + " score is not finite");
    }
    const double c = std::clamp(v, 0.0, cap(d));
    if (c != v && events) events->push_back({d, v, c});
    s.v_.set(d, c);
  }
  return s;
}

DimensionMeans aggregate(std::span<const PrismScore> scores) {
  if (scores.empty()) throw Error(Errc::EmptyInput, "no scores to aggregate");
  DimensionMeans m;
  for (Dimension d : kDimensions) {
    double sum = 0.0;
    for (const auto& s : scores) sum += s.get(d);
    m.set(d, sum / static_cast<double>(scores.size()));
  }
  return m;
}

double improvement_percent(double base, double other) {
  if (!(base > 0.0)) throw Error(Errc::DivisionByZeroBase, "improvement base must be positive");
  return (other - base) / base * 100.0;
}

std::string Improvement::text() const {
  if (!percent) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.1f%%", *percent);
  return buf;
}

std::array<Improvement, 4> improvement_table(const DimensionMeans& base, const DimensionMeans& other) {
  std::array<Improvement, 4> out{};
  for (std::size_t i = 0; i < kDimensions.size(); ++i) {
    const Dimension d = kDimensions[i];
    out[i].dimension = d;
    if (base.get(d) > 0.0) out[i].percent = improvement_percent(base.get(d), other.get(d));
  }
  return out;
}

std::string format_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace mind::prism
