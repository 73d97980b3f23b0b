#pragma once

#include "memdrift/error.hpp"
#include "memdrift/extraction.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace memdrift {

/// Weights of the drift score. Defaults penalize a missed edge twice as hard as a spurious one.
struct DriftWeights {
  double w_tp = 2.0;
  double w_fp = -0.5;
  double w_fn = -1.0;

  void validate() const {
    if (!(w_tp > 0.0)) throw ParameterError("w_tp must be positive");
  }
};

inline void to_json(nlohmann::json& j, const DriftWeights& w) {
  j = {{"w_tp", w.w_tp}, {"w_fp", w.w_fp}, {"w_fn", w.w_fn}};
}

inline void from_json(const nlohmann::json& j, DriftWeights& w) {
  w = DriftWeights{};
  if (j.contains("w_tp")) w.w_tp = j.at("w_tp").get<double>();
  if (j.contains("w_fp")) w.w_fp = j.at("w_fp").get<double>();
  if (j.contains("w_fn")) w.w_fn = j.at("w_fn").get<double>();
}

/// drift = 1 - max(0, (w_tp*TP + w_fp*FP + w_fn*FN) / (2P)), kept inside [0, 1].
/// 0 is perfect recovery, 1 is total loss. Undefined without gold edges.
inline double memory_drift(const EdgeTally& t, const DriftWeights& w = {}) {
  w.validate();
  if (t.gold_count == 0) throw ParameterError("memory drift is undefined for P = 0");
  const double weighted = w.w_tp * static_cast<double>(t.tp) + w.w_fp * static_cast<double>(t.fp) +
                          w.w_fn * static_cast<double>(t.fn);
  const double score = std::max(0.0, weighted / (2.0 * static_cast<double>(t.gold_count)));
  return std::clamp(1.0 - score, 0.0, 1.0);
}

struct PrecisionRecallF1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline PrecisionRecallF1 precision_recall_f1(const EdgeTally& t) {
  PrecisionRecallF1 r;
  if (t.tp + t.fp > 0) r.precision = static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fp);
  if (t.tp + t.fn > 0) r.recall = static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fn);
  if (r.precision + r.recall > 0.0) r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

struct MetricRow {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double memory_drift = 0.0;
  EdgeTally tally;
};

inline MetricRow score(const EdgeTally& t, const DriftWeights& w = {}) {
  auto prf = precision_recall_f1(t);
  return MetricRow{prf.precision, prf.recall, prf.f1, memory_drift(t, w), t};
}

}  // namespace memdrift
