#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "phenollm/dataset.hpp"

namespace phenollm {

// Per-column generator parameters. Values are assembled additively as
//   base + weekly_amplitude * sin(2*pi*weekday/7) + drift_per_day * day
//   + severity_shift * severity + noise * N(0,1)
// then clamped at 0, quantized to the column's precision, and finally
// scaled by any anomaly multiplier landing on that day.
struct FeatureGen {
  double base = 0.0;
  double weekly_amplitude = 0.0;
  double noise = 0.0;
  double drift_per_day = 0.0;
  double severity_shift = 0.0;
  double missing_rate = 0.0;
};

// One-day multiplicative distortion applied at the same offset of every
// subject-year timeline.
struct AnomalySpec {
  int day_offset = 0;
  std::string column_header;
  double multiplier = 1.0;
};

struct SyntheticSpec {
  std::uint64_t seed = 0;
  int subjects = 3;
  int years = 1;
  int weeks_per_year = 40;
  int window_days = 28;
  int start_year = 2018;  // study year 0 lives in this calendar year
  // Latent severity: each subject-year draws a base level (high with
  // probability positive_fraction), then per-week jitter on top.
  double positive_fraction = 0.5;
  double low_severity = 0.0;
  double high_severity = 0.75;
  double severity_jitter = 0.03;
  std::vector<FeatureGen> features;  // one per schema column
  std::vector<AnomalySpec> anomalies;

  // Plausible wearable-scale defaults for the 15-column daily schema.
  static SyntheticSpec plausible_defaults();
};

struct SyntheticResult {
  Dataset dataset;
  std::string csv;       // exact file content, loadable by load_dataset
  nlohmann::json truth;  // seed, spec echo, per-window severity and labels
};

// Deterministic: equal specs produce byte-identical csv and truth.
// Throws InvalidSpec on shape errors (feature count, unknown anomaly
// column, non-positive counts).
SyntheticResult generate_synthetic(const SyntheticSpec& spec, SchemaPtr schema);

nlohmann::json spec_to_json(const SyntheticSpec& spec);
SyntheticSpec spec_from_json(const nlohmann::json& j);

}  // namespace phenollm
