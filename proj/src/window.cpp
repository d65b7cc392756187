#include "phenollm/window.hpp"

#include <cmath>

#include "phenollm/errors.hpp"

namespace phenollm {

FeatureWindow::FeatureWindow(SchemaPtr schema, std::vector<Date> dates,
                             std::vector<Row> values)
    : schema_(std::move(schema)),
      dates_(std::move(dates)),
      values_(std::move(values)) {
  if (!schema_) throw InvalidWindow("null schema");
  if (dates_.empty()) throw InvalidWindow("no rows");
  if (dates_.size() != values_.size()) {
    throw InvalidWindow("date count " + std::to_string(dates_.size()) +
                        " != row count " + std::to_string(values_.size()));
  }
  for (std::size_t i = 1; i < dates_.size(); ++i) {
    if (dates_[i - 1].plus_days(1) != dates_[i]) {
      throw InvalidWindow("dates not consecutive at " + dates_[i].iso());
    }
  }
  const std::size_t width = schema_->size();
  for (std::size_t r = 0; r < values_.size(); ++r) {
    if (values_[r].size() != width) {
      throw InvalidWindow("row " + dates_[r].iso() + " has " +
                          std::to_string(values_[r].size()) + " of " +
                          std::to_string(width) + " columns");
    }
    for (const auto& v : values_[r]) {
      if (v && (!std::isfinite(*v) || *v < 0.0)) {
        throw InvalidWindow("non-finite or negative value at " +
                            dates_[r].iso());
      }
    }
  }
}

std::optional<std::size_t> FeatureWindow::row_of(const Date& d) const {
  const int offset = dates_.front().days_until(d);
  if (offset < 0 || offset >= static_cast<int>(dates_.size())) return std::nullopt;
  return static_cast<std::size_t>(offset);
}

bool FeatureWindow::has_missing() const {
  for (const auto& row : values_) {
    for (const auto& v : row) {
      if (!v) return true;
    }
  }
  return false;
}

const char* class_label_name(ClassLabel label) {
  switch (label) {
    case ClassLabel::Negative: return "negative";
    case ClassLabel::Borderline: return "borderline";
    case ClassLabel::Positive: return "positive";
  }
  return "unknown";
}

const char* target_name(Target target) {
  return target == Target::Depression ? "depression" : "anxiety";
}

std::optional<Target> parse_target_name(const std::string& name) {
  if (name == "depression") return Target::Depression;
  if (name == "anxiety") return Target::Anxiety;
  return std::nullopt;
}

ClassLabel label_sample(const AssessmentScores& scores, Target target,
                        const LabelPolicy& policy) {
  if (scores.phq4_total < 0 || scores.phq4_total > 12) {
    throw OutOfRange("phq4_total " + std::to_string(scores.phq4_total));
  }
  if (scores.anxiety_sub < 0 || scores.anxiety_sub > 6) {
    throw OutOfRange("anxiety_sub " + std::to_string(scores.anxiety_sub));
  }
  if (scores.anxiety_sub > scores.phq4_total) {
    throw OutOfRange("anxiety subscale " + std::to_string(scores.anxiety_sub) +
                     " exceeds total " + std::to_string(scores.phq4_total));
  }
  const int score = target == Target::Depression ? scores.phq4_total
                                                 : scores.anxiety_sub;
  const int neg_max = target == Target::Depression
                          ? policy.depression_negative_max
                          : policy.anxiety_negative_max;
  const int pos_min = target == Target::Depression
                          ? policy.depression_positive_min
                          : policy.anxiety_positive_min;
  if (score <= neg_max) return ClassLabel::Negative;
  if (score >= pos_min) return ClassLabel::Positive;
  return ClassLabel::Borderline;
}

}  // namespace phenollm
