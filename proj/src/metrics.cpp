#include "phenollm/metrics.hpp"

#include <cstdio>

#include "phenollm/errors.hpp"

namespace phenollm {

bool CellKey::operator<(const CellKey& other) const {
  if (strategy != other.strategy) return strategy < other.strategy;
  if (format != other.format) return format < other.format;
  return model < other.model;
}

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double CellMetrics::accuracy() const { return ratio(correct, total); }
double CellMetrics::yes_rate() const { return ratio(yes, total); }
double CellMetrics::no_rate() const { return ratio(no, total); }
double CellMetrics::unparseable_rate() const { return ratio(unparseable, total); }
double CellMetrics::tpr() const { return ratio(true_positive, truth_positive); }
double CellMetrics::tnr() const { return ratio(true_negative, truth_negative); }
double CellMetrics::balanced_accuracy() const { return (tpr() + tnr()) / 2.0; }

double CellMetrics::q_rate(int question) const {
  switch (question) {
    case 1: return ratio(q1, total);
    case 2: return ratio(q2, total);
    case 3: return ratio(q3, total);
    case 4: return ratio(q4, total);
    default: throw OutOfRange("rubric question must be 1..4");
  }
}

std::map<CellKey, CellMetrics> compute_metrics(
    const std::vector<RunRecord>& records) {
  std::map<CellKey, CellMetrics> cells;
  for (const RunRecord& r : records) {
    if (r.truth == ClassLabel::Borderline) {
      throw OutOfRange("borderline sample in scored records: " + r.sample_id);
    }
    CellMetrics& m = cells[{r.strategy, r.format, r.model}];
    m.total += 1;
    const bool truth_pos = r.truth == ClassLabel::Positive;
    (truth_pos ? m.truth_positive : m.truth_negative) += 1;
    switch (r.decision) {
      case Decision::Yes:
        m.yes += 1;
        if (truth_pos) {
          m.correct += 1;
          m.true_positive += 1;
        }
        break;
      case Decision::No:
        m.no += 1;
        if (!truth_pos) {
          m.correct += 1;
          m.true_negative += 1;
        }
        break;
      case Decision::Unparseable:
        m.unparseable += 1;
        break;
    }
    m.q1 += r.q1 ? 1 : 0;
    m.q2 += r.q2 ? 1 : 0;
    m.q3 += r.q3 ? 1 : 0;
    m.q4 += r.q4 ? 1 : 0;
  }
  return cells;
}

std::string render_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", fraction * 100.0);
  return buf;
}

}  // namespace phenollm
