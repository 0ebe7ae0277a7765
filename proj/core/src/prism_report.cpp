// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mind/prism/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "mind/error.hpp"

namespace mind::prism {

using nlohmann::json;

BenchmarkReport build_report(std::vector<ModelRow> models, std::optional<std::string> baseline) {
  BenchmarkReport r;
  r.models = std::move(models);
  r.baseline = std::move(baseline);
  if (!r.baseline) return r;

  auto base = std::find_if(r.models.begin(), r.models.end(),
                           [&](const ModelRow& m) { return m.name == *r.baseline; });
  if (base == r.models.end()) throw Error(Errc::ConfigError, "baseline model '" + *r.baseline + "' not found");
  for (const auto& m : r.models) {
    if (m.name == base->name) continue;
    r.improvements.push_back({m.name, improvement_table(base->means, m.means)});
  }
  return r;
}

namespace {

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string lpad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

}  // namespace

std::string render_text(const BenchmarkReport& report) {
  std::size_t name_w = 5;
  for (const auto& m : report.models) name_w = std::max(name_w, m.name.size());
  name_w += 2;
  constexpr std::size_t kCol = 8;

  std::string out = pad("Model", name_w);
  for (Dimension d : kDimensions) out += lpad(std::string(title(d)), kCol);
  out += lpad("Final", kCol) + lpad("Scored", kCol) + lpad("Excluded", kCol + 2) + "\n";
  out += std::string(name_w + kCol * 7 + 2, '-') + "\n";
  for (const auto& m : report.models) {
    out += pad(m.name, name_w);
    for (Dimension d : kDimensions) out += lpad(format_score(m.means.get(d)), kCol);
    out += lpad(format_score(m.means.total()), kCol);
    out += lpad(std::to_string(m.scored), kCol);
    out += lpad(std::to_string(m.excluded), kCol + 2);
    out += "\n";
  }
  if (report.baseline && !report.improvements.empty()) {
    out += "\nImprovement vs " + *report.baseline + "\n";
    for (const auto& row : report.improvements) {
      out += pad(row.model, name_w);
      for (const auto& imp : row.values) out += lpad(imp.text(), kCol);
      out += "\n";
    }
  }
  for (const auto& note : report.notes) out += "\nnote: " + note + "\n";
  return out;
}

std::string render_json(const BenchmarkReport& report) {
  json j;
  j["models"] = json::array();
  for (const auto& m : report.models) {
    json row = {{"name", m.name}, {"final", m.means.total()}, {"scored", m.scored},
                {"excluded", m.excluded}};
    for (Dimension d : kDimensions) row[std::string(to_string(d))] = m.means.get(d);
    j["models"].push_back(std::move(row));
  }
  j["baseline"] = report.baseline ? json(*report.baseline) : json(nullptr);
  j["improvements"] = json::array();
  for (const auto& row : report.improvements) {
    json imp = {{"model", row.model}};
    for (const auto& v : row.values) {
      imp[std::string(to_string(v.dimension))] = {
          {"percent", v.percent ? json(*v.percent) : json(nullptr)}, {"text", v.text()}};
    }
    j["improvements"].push_back(std::move(imp));
  }
  j["notes"] = report.notes;
  return j.dump(2) + "\n";
}

ModelMeansDocument parse_model_means(const std::string& text) {
  ModelMeansDocument doc;
  try {
    const json j = json::parse(text);
    for (const auto& m : j.at("models")) {
      ModelRow row;
      row.name = m.at("name").get<std::string>();
      for (Dimension d : kDimensions) {
        const double v = m.at(std::string(to_string(d))).get<double>();
        if (!std::isfinite(v)) throw Error(Errc::MalformedHeader, "non-finite mean for " + row.name);
        row.means.set(d, v);
      }
      row.scored = m.value("scored", std::size_t{0});
      row.excluded = m.value("excluded", std::size_t{0});
      doc.models.push_back(std::move(row));
    }
    if (j.contains("baseline") && j["baseline"].is_string()) doc.baseline = j["baseline"].get<std::string>();
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedHeader, std::string("model means document: ") + e.what());
  }
  return doc;
}

}  // namespace mind::prism
