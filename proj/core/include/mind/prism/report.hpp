// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mind/prism/score.hpp"

namespace mind::prism {

struct ModelRow {
  std::string name;
  DimensionMeans means;
  std::size_t scored = 0;    // clips that contributed to the means
  std::size_t excluded = 0;  // clips dropped because judging failed
  bool operator==(const ModelRow&) const = default;
};

struct ImprovementRow {
  std::string model;
  std::array<Improvement, 4> values;
};

struct BenchmarkReport {
  std::vector<ModelRow> models;
  std::optional<std::string> baseline;
  std::vector<ImprovementRow> improvements;  // every non-baseline model vs baseline
  std::vector<std::string> notes;            // e.g. models with no scored clips
};

// Throws ConfigError when the baseline is not among the models.
BenchmarkReport build_report(std::vector<ModelRow> models, std::optional<std::string> baseline);

// Aligned plain-text table: means, final score, then the improvement block.
std::string render_text(const BenchmarkReport& report);
std::string render_json(const BenchmarkReport& report);

// Model-means document:
//   {"models": [{"name", "mac", "mic", "pird", "dcr"}, ...], "baseline": "<name>"?}
// Values are taken as already-aggregated dimension means and are not clamped.
struct ModelMeansDocument {
  std::vector<ModelRow> models;
  std::optional<std::string> baseline;
};

ModelMeansDocument parse_model_means(const std::string& text);

}  // namespace mind::prism
