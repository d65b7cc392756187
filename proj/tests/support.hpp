// Shared test fixtures. canonical_window() is the frozen 28-day window the
// golden serialization and prompt fixtures are built from; changing it
// invalidates every stored fixture.
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "phenollm/rng.hpp"
#include "phenollm/schema.hpp"
#include "phenollm/window.hpp"

namespace phenollm::testing {

inline std::optional<double> cell(double v) { return v; }
inline std::optional<double> gap() { return std::nullopt; }

// 28 days starting 2019-04-29. The first two rows are the documented
// example rows (two gaps each); the rest is deterministic filler with a
// fixed missingness pattern.
inline FeatureWindow canonical_window() {
  const SchemaPtr& schema = globem_schema();
  std::vector<Date> dates;
  const Date start(2019, 4, 29);
  for (int d = 0; d < 28; ++d) dates.push_back(start.plus_days(d));

  std::vector<FeatureWindow::Row> rows;
  rows.push_back({cell(49037), cell(666), cell(0.85), cell(298), cell(3),
                  gap(), gap(), cell(29), cell(11430), cell(40), cell(1290),
                  cell(39), cell(150), cell(306), cell(11)});
  rows.push_back({cell(69171), cell(555), cell(0.87), cell(274), cell(4),
                  cell(16), gap(), cell(13), cell(11427), cell(49), cell(1264),
                  cell(48), cell(176), gap(), gap()});

  const double base[15] = {52000, 600, 0.9,  280, 4,   12,  14, 25,
                           11000, 45,  1250, 42,  160, 320, 18};
  const double scale[15] = {900, 12, 0.02, 6, 0.25, 2, 2, 2,
                            300, 2,  20,   2, 8,    9, 2};
  for (int d = 2; d < 28; ++d) {
    FeatureWindow::Row row;
    for (int c = 0; c < 15; ++c) {
      if ((d * 5 + c * 11) % 37 == 0) {
        row.push_back(gap());
        continue;
      }
      const int wiggle = (d * 7 + c * 3) % 13 - 6;
      double v = base[c] + wiggle * scale[c];
      if (schema->column(c).fixed_decimals >= 0) {
        v = std::round(v * 100.0) / 100.0;
      } else {
        v = std::round(v);
      }
      row.push_back(cell(v));
    }
    rows.push_back(std::move(row));
  }
  return FeatureWindow(schema, std::move(dates), std::move(rows));
}

// Valid random window whose values survive render/parse exactly: integers
// for free columns, pinned precision otherwise.
inline FeatureWindow random_window(Rng& rng, std::size_t days,
                                   double missing_rate) {
  const SchemaPtr& schema = globem_schema();
  std::vector<Date> dates;
  const Date start = Date(2018, 1, 1).plus_days(static_cast<int>(rng.below(700)));
  for (std::size_t d = 0; d < days; ++d) {
    dates.push_back(start.plus_days(static_cast<int>(d)));
  }
  std::vector<FeatureWindow::Row> rows;
  for (std::size_t d = 0; d < days; ++d) {
    FeatureWindow::Row row;
    for (std::size_t c = 0; c < schema->size(); ++c) {
      if (rng.chance(missing_rate)) {
        row.push_back(gap());
        continue;
      }
      double v = rng.uniform(0.0, 20000.0);
      if (schema->column(c).fixed_decimals >= 0) {
        v = std::round(v) / 100.0;  // two stable decimals
      } else {
        v = std::round(v);
      }
      row.push_back(cell(v));
    }
    rows.push_back(std::move(row));
  }
  return FeatureWindow(schema, std::move(dates), std::move(rows));
}

}  // namespace phenollm::testing
