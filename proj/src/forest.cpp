#include "phenollm/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "phenollm/dataset.hpp"
#include "phenollm/errors.hpp"
#include "phenollm/rng.hpp"

namespace phenollm {

using json = nlohmann::json;

namespace {

struct TrainingMatrix {
  std::vector<std::vector<double>> x;  // imputed
  std::vector<bool> positive;
  std::vector<double> means;
};

TrainingMatrix build_matrix(const std::vector<LabeledSample>& samples,
                            const ForestConfig& config) {
  TrainingMatrix m;
  const std::size_t features = samples.front().window.schema()->size();
  std::vector<std::vector<std::optional<double>>> raw;
  raw.reserve(samples.size());
  for (const LabeledSample& s : samples) {
    const ClassLabel label = s.label(config.target, config.policy);
    if (label == ClassLabel::Borderline) {
      throw BorderlineSamplePresent(s.subject_id + " @ " + s.end_date().iso());
    }
    raw.push_back(average_features(s.window));
    m.positive.push_back(label == ClassLabel::Positive);
  }
  m.means.assign(features, 0.0);
  for (std::size_t c = 0; c < features; ++c) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& row : raw) {
      if (row[c]) {
        sum += *row[c];
        ++n;
      }
    }
    m.means[c] = n == 0 ? 0.0 : sum / static_cast<double>(n);
  }
  m.x.reserve(raw.size());
  for (const auto& row : raw) {
    std::vector<double> dense(features);
    for (std::size_t c = 0; c < features; ++c) {
      dense[c] = row[c] ? *row[c] : m.means[c];
    }
    m.x.push_back(std::move(dense));
  }
  return m;
}

double gini(std::size_t pos, std::size_t total) {
  if (total == 0) return 0.0;
  const double p = static_cast<double>(pos) / static_cast<double>(total);
  return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

struct TreeBuilder {
  const TrainingMatrix& m;
  const ForestConfig& config;
  std::size_t features_per_split;
  Rng& rng;
  std::vector<TreeNode> nodes;

  int leaf(const std::vector<std::size_t>& idx) {
    std::size_t pos = 0;
    for (std::size_t i : idx) pos += m.positive[i] ? 1 : 0;
    TreeNode node;
    node.positive_fraction =
        idx.empty() ? 0.0
                    : static_cast<double>(pos) / static_cast<double>(idx.size());
    nodes.push_back(node);
    return static_cast<int>(nodes.size() - 1);
  }

  int build(std::vector<std::size_t> idx, std::size_t depth) {
    std::size_t pos = 0;
    for (std::size_t i : idx) pos += m.positive[i] ? 1 : 0;
    const bool pure = pos == 0 || pos == idx.size();
    if (pure || depth >= config.max_depth ||
        idx.size() < config.min_samples_split) {
      return leaf(idx);
    }

    // feature subset: partial Fisher-Yates over column indices
    const std::size_t total_features = m.means.size();
    std::vector<std::size_t> cols(total_features);
    std::iota(cols.begin(), cols.end(), 0);
    for (std::size_t i = 0; i < features_per_split && i + 1 < cols.size(); ++i) {
      const std::size_t j = i + rng.index(cols.size() - i);
      std::swap(cols[i], cols[j]);
    }
    cols.resize(std::min(features_per_split, total_features));

    const double parent = gini(pos, idx.size());
    double best_gain = 0.0;
    std::size_t best_col = 0;
    double best_thr = 0.0;
    for (std::size_t col : cols) {
      std::vector<std::pair<double, bool>> ordered;
      ordered.reserve(idx.size());
      for (std::size_t i : idx) ordered.emplace_back(m.x[i][col], m.positive[i]);
      std::sort(ordered.begin(), ordered.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      std::size_t left_pos = 0;
      for (std::size_t k = 0; k + 1 < ordered.size(); ++k) {
        left_pos += ordered[k].second ? 1 : 0;
        if (ordered[k].first == ordered[k + 1].first) continue;
        const double thr = ordered[k].first +
                           (ordered[k + 1].first - ordered[k].first) / 2.0;
        const std::size_t left_n = k + 1;
        const std::size_t right_n = ordered.size() - left_n;
        const double weighted =
            (static_cast<double>(left_n) * gini(left_pos, left_n) +
             static_cast<double>(right_n) * gini(pos - left_pos, right_n)) /
            static_cast<double>(ordered.size());
        const double gain = parent - weighted;
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best_col = col;
          best_thr = thr;
        }
      }
    }
    if (best_gain <= 0.0) return leaf(idx);

    std::vector<std::size_t> left_idx, right_idx;
    for (std::size_t i : idx) {
      (m.x[i][best_col] < best_thr ? left_idx : right_idx).push_back(i);
    }
    if (left_idx.empty() || right_idx.empty()) return leaf(idx);

    const int self = static_cast<int>(nodes.size());
    TreeNode node;
    node.column = static_cast<int>(best_col);
    node.threshold = best_thr;
    nodes.push_back(node);
    const int l = build(std::move(left_idx), depth + 1);
    const int r = build(std::move(right_idx), depth + 1);
    nodes[static_cast<std::size_t>(self)].left = l;
    nodes[static_cast<std::size_t>(self)].right = r;
    return self;
  }
};

bool walk_positive(const std::vector<TreeNode>& tree,
                   const std::vector<double>& x) {
  std::size_t at = 0;
  while (tree[at].column >= 0) {
    const TreeNode& n = tree[at];
    at = static_cast<std::size_t>(
        x[static_cast<std::size_t>(n.column)] < n.threshold ? n.left : n.right);
  }
  return tree[at].positive_fraction > 0.5;
}

json config_to_json(const ForestConfig& c) {
  return json{{"trees", c.trees},
              {"max_depth", c.max_depth},
              {"min_samples_split", c.min_samples_split},
              {"features_per_split", c.features_per_split},
              {"seed", c.seed},
              {"target", target_name(c.target)},
              {"policy",
               {{"depression_negative_max", c.policy.depression_negative_max},
                {"depression_positive_min", c.policy.depression_positive_min},
                {"anxiety_negative_max", c.policy.anxiety_negative_max},
                {"anxiety_positive_min", c.policy.anxiety_positive_min}}}};
}

ForestConfig config_from_json(const json& j) {
  ForestConfig c;
  c.trees = j.at("trees").get<std::size_t>();
  c.max_depth = j.at("max_depth").get<std::size_t>();
  c.min_samples_split = j.at("min_samples_split").get<std::size_t>();
  c.features_per_split = j.at("features_per_split").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  const auto target = parse_target_name(j.at("target").get<std::string>());
  if (!target) throw InvalidSpec("unknown target in forest dump");
  c.target = *target;
  const json& p = j.at("policy");
  c.policy.depression_negative_max = p.at("depression_negative_max").get<int>();
  c.policy.depression_positive_min = p.at("depression_positive_min").get<int>();
  c.policy.anxiety_negative_max = p.at("anxiety_negative_max").get<int>();
  c.policy.anxiety_positive_min = p.at("anxiety_positive_min").get<int>();
  return c;
}

}  // namespace

TrainedForest::TrainedForest(ForestConfig config, std::vector<double> column_means,
                             std::vector<std::vector<TreeNode>> trees)
    : config_(config),
      column_means_(std::move(column_means)),
      trees_(std::move(trees)) {
  if (trees_.empty()) throw InvalidSpec("forest has no trees");
  if (column_means_.empty()) throw InvalidSpec("forest has no feature means");
}

double TrainedForest::vote_fraction(
    const std::vector<std::optional<double>>& features) const {
  if (features.size() != column_means_.size()) {
    throw InvalidSpec("feature vector width does not match the forest");
  }
  std::vector<double> dense(features.size());
  for (std::size_t c = 0; c < features.size(); ++c) {
    dense[c] = features[c] ? *features[c] : column_means_[c];
  }
  std::size_t votes = 0;
  for (const auto& tree : trees_) {
    votes += walk_positive(tree, dense) ? 1 : 0;
  }
  return static_cast<double>(votes) / static_cast<double>(trees_.size());
}

ClassLabel TrainedForest::predict(
    const std::vector<std::optional<double>>& features) const {
  // strict majority: an even split stays negative
  return vote_fraction(features) > 0.5 ? ClassLabel::Positive
                                       : ClassLabel::Negative;
}

ClassLabel TrainedForest::predict(const FeatureWindow& window) const {
  return predict(average_features(window));
}

std::string TrainedForest::to_json() const {
  json trees = json::array();
  for (const auto& tree : trees_) {
    json nodes = json::array();
    for (const TreeNode& n : tree) {
      nodes.push_back({{"column", n.column},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"positive_fraction", n.positive_fraction}});
    }
    trees.push_back(std::move(nodes));
  }
  const json dump = {{"kind", "random_forest"},
                     {"config", config_to_json(config_)},
                     {"column_means", column_means_},
                     {"trees", trees}};
  return dump.dump(2) + "\n";
}

TrainedForest TrainedForest::from_json(const std::string& text) {
  json parsed;
  try {
    parsed = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidSpec(std::string("malformed forest dump: ") + e.what());
  }
  if (parsed.value("kind", "") != "random_forest") {
    throw InvalidSpec("not a forest dump");
  }
  std::vector<std::vector<TreeNode>> trees;
  for (const json& jt : parsed.at("trees")) {
    std::vector<TreeNode> tree;
    for (const json& jn : jt) {
      TreeNode n;
      n.column = jn.at("column").get<int>();
      n.threshold = jn.at("threshold").get<double>();
      n.left = jn.at("left").get<int>();
      n.right = jn.at("right").get<int>();
      n.positive_fraction = jn.at("positive_fraction").get<double>();
      tree.push_back(n);
    }
    trees.push_back(std::move(tree));
  }
  return TrainedForest(config_from_json(parsed.at("config")),
                       parsed.at("column_means").get<std::vector<double>>(),
                       std::move(trees));
}

TrainedForest train_forest(const std::vector<LabeledSample>& samples,
                           const ForestConfig& config) {
  if (samples.empty()) throw EmptyTrainingSet();

  // canonical order first: training must not depend on caller ordering
  std::vector<const LabeledSample*> ordered;
  ordered.reserve(samples.size());
  for (const LabeledSample& s : samples) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(),
            [](const LabeledSample* a, const LabeledSample* b) {
              if (a->subject_id != b->subject_id)
                return a->subject_id < b->subject_id;
              if (a->end_date() != b->end_date())
                return a->end_date() < b->end_date();
              return a->scores.phq4_total < b->scores.phq4_total;
            });
  std::vector<LabeledSample> canonical;
  canonical.reserve(ordered.size());
  for (const LabeledSample* p : ordered) canonical.push_back(*p);

  const TrainingMatrix m = build_matrix(canonical, config);
  const std::size_t n = m.x.size();
  const std::size_t features = m.means.size();
  const std::size_t per_split =
      config.features_per_split > 0
          ? std::min(config.features_per_split, features)
          : static_cast<std::size_t>(std::floor(std::sqrt(
                static_cast<double>(features))));

  std::vector<std::vector<TreeNode>> trees;
  trees.reserve(config.trees);
  for (std::size_t t = 0; t < config.trees; ++t) {
    Rng rng(derive_seed(config.seed, {static_cast<std::uint64_t>(t)}));
    std::vector<std::size_t> bag(n);
    for (std::size_t i = 0; i < n; ++i) bag[i] = rng.index(n);
    std::sort(bag.begin(), bag.end());
    TreeBuilder builder{m, config, per_split, rng, {}};
    builder.build(std::move(bag), 0);
    trees.push_back(std::move(builder.nodes));
  }
  return TrainedForest(config, m.means, std::move(trees));
}

double evaluate_accuracy(const TrainedForest& forest,
                         const std::vector<LabeledSample>& samples) {
  if (samples.empty()) throw EmptyRecords("no samples to evaluate");
  std::size_t hits = 0;
  for (const LabeledSample& s : samples) {
    const ClassLabel truth =
        s.label(forest.config().target, forest.config().policy);
    if (forest.predict(s.window) == truth) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

}  // namespace phenollm
