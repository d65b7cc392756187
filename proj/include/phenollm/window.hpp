#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phenollm/date.hpp"
#include "phenollm/schema.hpp"

namespace phenollm {

// One observation window: consecutive daily rows of optional sensor values.
// Invariants (checked on construction): dates strictly consecutive, every
// row as wide as the schema, every present value finite and non-negative.
class FeatureWindow {
 public:
  using Row = std::vector<std::optional<double>>;

  FeatureWindow(SchemaPtr schema, std::vector<Date> dates,
                std::vector<Row> values);

  const SchemaPtr& schema() const { return schema_; }
  const std::vector<Date>& dates() const { return dates_; }
  const std::vector<Row>& values() const { return values_; }

  std::size_t days() const { return dates_.size(); }
  Date start_date() const { return dates_.front(); }
  Date end_date() const { return dates_.back(); }

  std::optional<std::size_t> row_of(const Date& d) const;
  const std::optional<double>& at(std::size_t day, std::size_t col) const {
    return values_.at(day).at(col);
  }

  bool has_missing() const;

 private:
  SchemaPtr schema_;
  std::vector<Date> dates_;
  std::vector<Row> values_;
};

enum class ClassLabel { Negative, Borderline, Positive };
enum class Target { Depression, Anxiety };

const char* class_label_name(ClassLabel label);
const char* target_name(Target target);
std::optional<Target> parse_target_name(const std::string& name);

// PHQ-4 screener totals collected with the window: full-scale total 0..12
// and the anxiety subscale 0..6 (never exceeding the total).
struct AssessmentScores {
  int phq4_total = 0;
  int anxiety_sub = 0;
};

// Class cutoffs. Depression follows the screener convention Negative < 1,
// Positive > 5; anxiety mirrors it at subscale width with the validated
// cutoff of 3.
struct LabelPolicy {
  int depression_negative_max = 0;
  int depression_positive_min = 6;
  int anxiety_negative_max = 0;
  int anxiety_positive_min = 3;
};

// Throws OutOfRange when the scores violate the screener bounds.
ClassLabel label_sample(const AssessmentScores& scores, Target target,
                        const LabelPolicy& policy = {});

struct LabeledSample {
  std::string subject_id;
  int study_year = 0;
  FeatureWindow window;
  AssessmentScores scores;

  Date end_date() const { return window.end_date(); }
  ClassLabel label(Target target, const LabelPolicy& policy = {}) const {
    return label_sample(scores, target, policy);
  }
};

}  // namespace phenollm
