#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phenollm/window.hpp"

namespace phenollm {

struct ForestConfig {
  std::size_t trees = 100;
  std::size_t max_depth = 8;
  std::size_t min_samples_split = 2;
  // 0 picks floor(sqrt(feature count)) at each split.
  std::size_t features_per_split = 0;
  std::uint64_t seed = 0;
  Target target = Target::Depression;
  LabelPolicy policy;
};

// Flat node storage; column < 0 marks a leaf carrying positive_fraction.
struct TreeNode {
  int column = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double positive_fraction = 0.0;
};

// Bagged Gini decision trees over per-window feature means. Missing
// features are imputed with the training means both at fit and at predict
// time.
class TrainedForest {
 public:
  TrainedForest(ForestConfig config, std::vector<double> column_means,
                std::vector<std::vector<TreeNode>> trees);

  // features: one value per schema column, missing allowed
  ClassLabel predict(const std::vector<std::optional<double>>& features) const;
  ClassLabel predict(const FeatureWindow& window) const;
  // fraction of trees voting positive; ties break negative in predict()
  double vote_fraction(const std::vector<std::optional<double>>& features) const;

  const ForestConfig& config() const { return config_; }
  const std::vector<double>& column_means() const { return column_means_; }
  const std::vector<std::vector<TreeNode>>& trees() const { return trees_; }

  std::string to_json() const;
  static TrainedForest from_json(const std::string& text);

 private:
  ForestConfig config_;
  std::vector<double> column_means_;
  std::vector<std::vector<TreeNode>> trees_;
};

// Trains on the samples' window means. Sorts the input canonically by
// (subject, end date, total score) first so resampling does not depend on
// caller ordering. Throws EmptyTrainingSet and, because a two-class forest
// cannot represent a third outcome, BorderlineSamplePresent.
TrainedForest train_forest(const std::vector<LabeledSample>& samples,
                           const ForestConfig& config);

double evaluate_accuracy(const TrainedForest& forest,
                         const std::vector<LabeledSample>& samples);

}  // namespace phenollm
