#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "ogdl/tensor.hpp"

namespace ogdl {

// Binary confusion counts; the positive class is UC.
struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::uint64_t total() const { return tp + fp + fn + tn; }
};

inline ConfusionCounts confusion(const std::vector<int>& predictions, const std::vector<int>& truth) {
  if (predictions.size() != truth.size()) throw ConfigError("confusion: length mismatch");
  ConfusionCounts c;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] != 0 && predictions[i] != 1) throw ConfigError("confusion: non-binary prediction");
    if (truth[i] != 0 && truth[i] != 1) throw ConfigError("confusion: non-binary truth");
    if (truth[i] == 1)
      predictions[i] == 1 ? ++c.tp : ++c.fn;
    else
      predictions[i] == 1 ? ++c.fp : ++c.tn;
  }
  return c;
}

// Percentages in [0, 100]; a ratio with empty denominator (0/0) is reported
// as absent rather than 0.
struct MetricsReport {
  std::optional<double> precision, recall, f1, specificity, accuracy;
};

inline MetricsReport metrics(const ConfusionCounts& c) {
  MetricsReport m;
  auto pct = [](std::uint64_t num, std::uint64_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return 100.0 * static_cast<double>(num) / static_cast<double>(den);
  };
  m.precision = pct(c.tp, c.tp + c.fp);
  m.recall = pct(c.tp, c.tp + c.fn);
  m.specificity = pct(c.tn, c.tn + c.fp);
  m.accuracy = pct(c.tp + c.tn, c.total());
  if (m.precision && m.recall && (*m.precision + *m.recall) > 0.0)
    m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  return m;
}

inline double f1_from(double precision, double recall) {
  return 2.0 * precision * recall / (precision + recall);
}

// "75.27" with two decimals, or the placeholder when the metric is undefined.
inline std::string format_metric(const std::optional<double>& v, const char* absent = "-") {
  if (!v.has_value()) return absent;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v);
  return buf;
}

}  // namespace ogdl
