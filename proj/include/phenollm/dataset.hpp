#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phenollm/window.hpp"

namespace phenollm {

struct Dataset {
  SchemaPtr schema;
  std::vector<LabeledSample> samples;
  // Assessments whose trailing window was not fully covered by daily rows.
  std::size_t dropped_short_windows = 0;
};

// Loads daily-feature CSV exports. `path` may be a single file or a
// directory (every *.csv inside, sorted by name). Expected columns: `date`,
// the schema raw names, `phq4_total`, `phq4_anxiety`, and optionally `pid`;
// unknown columns are ignored and the subject id falls back to the file
// stem when `pid` is absent. A row carrying a phq4_total value marks an
// assessment day; the window is the `window_days` rows ending there.
// Unparseable or negative feature values load as missing. Scores must be
// integers in range (throws OutOfRange). Throws EmptyDataset when nothing
// qualifies.
Dataset load_dataset(const std::string& path, SchemaPtr schema,
                     int window_days = 28);

// Per-column mean over present values; a column with no present values
// yields nullopt.
std::vector<std::optional<double>> average_features(const FeatureWindow& window);

struct DatasetSplit {
  std::vector<LabeledSample> test;   // class-balanced within each study year
  std::vector<LabeledSample> train;  // remaining non-borderline samples
};

// Draws per_year/2 positive and per_year/2 negative samples from every
// study year present in the pool (seeded, input-order independent); the
// rest of the non-borderline pool becomes train. Borderline samples are
// excluded from both sides. Throws InsufficientClass when a year cannot
// fill its quota and OutOfRange when per_year is odd or zero.
DatasetSplit balanced_sample(const std::vector<LabeledSample>& pool,
                             std::size_t per_year, std::uint64_t seed,
                             Target target = Target::Depression,
                             const LabelPolicy& policy = {});

}  // namespace phenollm
