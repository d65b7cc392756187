#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace phenollm {

struct FeatureColumn {
  // Name used in raw sensor exports, e.g.
  // "f_steps:fitbit_steps_intraday_rapids_sumsteps:allday".
  std::string raw_name;
  // Human phrase used in documentation and claim matching, e.g. "step count".
  std::string display_name;
  // Header written into serialized tables, e.g. "step_count".
  std::string header_name;
  // "minutes", "meters", "" for unitless counts and scores.
  std::string unit;
  // One-sentence explanation used in prompt variable descriptions.
  std::string description;
  // >= 0 pins the rendered precision (location entropy uses 2).
  int fixed_decimals = -1;
  // Extra words that refer to this column in free text ("sleep" for the
  // asleep-duration column). display_name tokens are matched implicitly.
  std::vector<std::string> aliases;
};

// Ordered sensor-column layout of a daily feature table. The date column is
// implicit and always first; columns() holds only the sensor features.
class FeatureSchema {
 public:
  FeatureSchema(std::string name, std::vector<FeatureColumn> columns);

  const std::string& name() const { return name_; }
  const std::vector<FeatureColumn>& columns() const { return columns_; }
  std::size_t size() const { return columns_.size(); }
  const FeatureColumn& column(std::size_t i) const { return columns_.at(i); }

  std::optional<std::size_t> index_of_raw(const std::string& raw) const;
  std::optional<std::size_t> index_of_header(const std::string& header) const;

 private:
  std::string name_;
  std::vector<FeatureColumn> columns_;
};

using SchemaPtr = std::shared_ptr<const FeatureSchema>;

// The 15-feature wearable-study layout (GLOBEM daily exports): location,
// screen, call, Bluetooth, step, and sleep aggregates. Singleton; shared by
// every window built from it.
const SchemaPtr& globem_schema();

}  // namespace phenollm
