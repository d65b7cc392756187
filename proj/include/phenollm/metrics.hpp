#pragma once

#include <map>
#include <string>
#include <vector>

#include "phenollm/experiment.hpp"

namespace phenollm {

struct CellKey {
  Strategy strategy = Strategy::DirectPrediction;
  DataFormat format = DataFormat::Csv;
  std::string model;

  bool operator<(const CellKey& other) const;
};

// Aggregates for one (strategy, format, model) cell. Unparseable replies
// stay in the denominator: a reply that cannot be scored is a miss.
struct CellMetrics {
  std::size_t total = 0;
  std::size_t yes = 0;
  std::size_t no = 0;
  std::size_t unparseable = 0;
  std::size_t correct = 0;
  std::size_t true_positive = 0;
  std::size_t true_negative = 0;
  std::size_t truth_positive = 0;
  std::size_t truth_negative = 0;
  std::size_t q1 = 0, q2 = 0, q3 = 0, q4 = 0;

  double accuracy() const;
  double yes_rate() const;
  double no_rate() const;
  double unparseable_rate() const;
  double tpr() const;  // recall on positives
  double tnr() const;  // recall on negatives
  double balanced_accuracy() const;
  double q_rate(int question) const;  // 1..4
};

std::map<CellKey, CellMetrics> compute_metrics(
    const std::vector<RunRecord>& records);

// "0.6111" -> "61.11%"
std::string render_percent(double fraction);

}  // namespace phenollm
