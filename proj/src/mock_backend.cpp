#include "phenollm/mock_backend.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "phenollm/errors.hpp"
#include "phenollm/rng.hpp"

namespace phenollm {

namespace {

// Margins mirror the verifier's defaults with headroom so every emitted
// trend is decisively right or decisively wrong, never borderline.
constexpr double kGapFloor = 0.06;    // 3x the verifier trend margin
constexpr double kCovHigh = 0.42;     // 1.2x the high-variability cutoff
constexpr double kCovLow = 0.12;      // 0.8x the low-variability cutoff

std::string with_separators(long long v) {
  std::string digits = std::to_string(v);
  std::string out;
  int count = 0;
  for (std::size_t i = digits.size(); i-- > 0;) {
    out += digits[i];
    if (++count == 3 && i != 0) {
      out += ',';
      count = 0;
    }
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::string render_value(double v, int decimals) {
  if (decimals <= 0) return with_separators(std::llround(v));
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

// Display name without the parenthesized unit: "total time asleep".
std::string phrase_of(const FeatureColumn& col) {
  const std::string& d = col.display_name;
  const std::size_t paren = d.find(" (");
  return paren == std::string::npos ? d : d.substr(0, paren);
}

std::string unit_word(const FeatureColumn& col, std::size_t index) {
  if (col.unit == "minutes") return "minutes";
  if (col.unit == "meters") return "meters";
  switch (index) {
    case 7: return "devices";
    case 8: return "steps";
    case 9:
    case 11: return "episodes";
    default: return "";
  }
}

double corrupt_value(double v, Rng& rng) {
  const bool integral = v == std::floor(v);
  if (integral && v >= 10.0 && rng.chance(0.5)) {
    return std::floor(v / 10.0);  // drop the last digit
  }
  return v * 10.0;
}

std::vector<double> column_values(const FeatureWindow& w, std::size_t col,
                                  std::size_t begin, std::size_t end) {
  std::vector<double> out;
  for (std::size_t r = begin; r < end; ++r) {
    if (w.at(r, col)) out.push_back(*w.at(r, col));
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

struct PointCand { std::size_t row, col; };
struct ExtCand { std::size_t col; bool max; double ext; std::size_t row; };
struct AggCand { std::size_t col; double mean; };

enum class TrendCandKind { Slope, Variability, ExtremumDate, AboveAverage };

struct TrendCand {
  TrendCandKind kind = TrendCandKind::Slope;
  std::size_t col = 0;
  bool positive = true;  // increase / high variability / max / above
  std::size_t row = 0;   // extremum or comparison row
};

}  // namespace

const char* answer_mode_name(AnswerMode mode) {
  switch (mode) {
    case AnswerMode::AlwaysNo: return "always-no";
    case AnswerMode::AlwaysYes: return "always-yes";
    case AnswerMode::OracleLabel: return "oracle";
    case AnswerMode::Coin: return "coin";
  }
  return "unknown";
}

std::optional<AnswerMode> parse_answer_mode(const std::string& name) {
  if (name == "always-no") return AnswerMode::AlwaysNo;
  if (name == "always-yes") return AnswerMode::AlwaysYes;
  if (name == "oracle") return AnswerMode::OracleLabel;
  if (name == "coin") return AnswerMode::Coin;
  return std::nullopt;
}

MockReply mock_reason(const MockPolicy& policy, const FeatureWindow& window,
                      std::uint64_t prompt_hash,
                      std::optional<ClassLabel> oracle_label, Target target) {
  const FeatureSchema& schema = *window.schema();
  Rng rng(derive_seed(policy.seed, {prompt_hash}));

  // Candidate pools from true window statistics. Values below 1 are
  // excluded so corruption by a factor of 10 always lands outside the
  // verifier's rounding tolerance.
  std::vector<PointCand> points;
  std::vector<ExtCand> extrema;
  std::vector<AggCand> aggregates;
  std::vector<TrendCand> trends;
  for (std::size_t c = 0; c < schema.size(); ++c) {
    const auto values = column_values(window, c, 0, window.days());
    for (std::size_t r = 0; r < window.days(); ++r) {
      if (window.at(r, c) && *window.at(r, c) >= 1.0) points.push_back({r, c});
    }
    if (values.empty()) continue;
    const double mx = *std::max_element(values.begin(), values.end());
    const double mn = *std::min_element(values.begin(), values.end());
    for (const bool want_max : {true, false}) {
      const double ext = want_max ? mx : mn;
      if (ext < 1.0) continue;
      std::size_t row = 0;
      for (std::size_t r = 0; r < window.days(); ++r) {
        if (window.at(r, c) && *window.at(r, c) == ext) {
          row = r;
          break;
        }
      }
      extrema.push_back({c, want_max, ext, row});
    }
    const double mu = mean_of(values);
    if (std::llround(mu) >= 1) aggregates.push_back({c, mu});

    // slope: early half vs late half, as the verifier scores it
    const std::size_t mid = window.days() / 2;
    const auto first = column_values(window, c, 0, mid);
    const auto second = column_values(window, c, mid, window.days());
    if (!first.empty() && !second.empty()) {
      const double m1 = mean_of(first);
      const double m2 = mean_of(second);
      const double denom = std::max(std::fabs(m1), std::fabs(m2));
      if (denom > 0.0 && std::fabs(m2 - m1) / denom >= kGapFloor) {
        trends.push_back({TrendCandKind::Slope, c, m2 > m1, 0});
      }
    }
    if (values.size() >= 2 && mu > 0.0) {
      double ss = 0.0;
      for (double x : values) ss += (x - mu) * (x - mu);
      const double cov = std::sqrt(ss / static_cast<double>(values.size())) / mu;
      if (cov >= kCovHigh) {
        trends.push_back({TrendCandKind::Variability, c, true, 0});
      } else if (cov <= kCovLow) {
        trends.push_back({TrendCandKind::Variability, c, false, 0});
      }
    }
    // extremum date: needs a second distinct value to corrupt towards
    if (mx >= 1.0 && mn != mx) {
      std::size_t row = 0;
      for (std::size_t r = 0; r < window.days(); ++r) {
        if (window.at(r, c) && *window.at(r, c) == mx) {
          row = r;
          break;
        }
      }
      trends.push_back({TrendCandKind::ExtremumDate, c, true, row});
      if (std::fabs(mx - mu) / std::max(mx, std::fabs(mu)) >= kGapFloor) {
        trends.push_back({TrendCandKind::AboveAverage, c, true, row});
      }
    }
  }

  MockReply reply;
  reply.prompt_hash = prompt_hash;

  std::ostringstream numbered;
  std::size_t line = 0;
  const auto iso = [&](std::size_t row) { return window.dates()[row].iso(); };

  for (std::size_t i = 0; i < policy.claims_per_response; ++i) {
    std::size_t kind = rng.below(4);
    if (kind == 2 && extrema.empty()) kind = 0;
    if (kind == 3 && aggregates.empty()) kind = 0;
    if (kind <= 1 && points.empty()) continue;
    const bool corrupt = rng.chance(policy.numeric_error_rate);

    TruthClaim truth;
    truth.numeric = true;
    truth.corrupted = corrupt;
    std::ostringstream s;
    if (kind <= 1) {
      const std::size_t pick = rng.index(points.size());
      const PointCand cand = points[pick];
      points.erase(points.begin() + static_cast<std::ptrdiff_t>(pick));
      const FeatureColumn& col = schema.column(cand.col);
      double v = *window.at(cand.row, cand.col);
      if (corrupt) v = corrupt_value(v, rng);
      const int decimals = col.fixed_decimals > 0 ? col.fixed_decimals : 0;
      s << "On " << iso(cand.row) << ", the " << phrase_of(col) << " was "
        << render_value(v, decimals);
      const std::string unit = unit_word(col, cand.col);
      if (!unit.empty()) s << " " << unit;
      s << ".";
      truth.column = cand.col;
    } else if (kind == 2) {
      const std::size_t pick = rng.index(extrema.size());
      const ExtCand cand = extrema[pick];
      extrema.erase(extrema.begin() + static_cast<std::ptrdiff_t>(pick));
      const FeatureColumn& col = schema.column(cand.col);
      double v = cand.ext;
      if (corrupt) v = corrupt_value(v, rng);
      const int decimals = col.fixed_decimals > 0 ? col.fixed_decimals : 0;
      s << "The " << (cand.max ? "highest" : "lowest") << " " << phrase_of(col)
        << " in the window was " << render_value(v, decimals);
      const std::string unit = unit_word(col, cand.col);
      if (!unit.empty()) s << " " << unit;
      s << ", recorded on " << iso(cand.row) << ".";
      truth.column = cand.col;
    } else {
      const std::size_t pick = rng.index(aggregates.size());
      const AggCand cand = aggregates[pick];
      aggregates.erase(aggregates.begin() + static_cast<std::ptrdiff_t>(pick));
      const FeatureColumn& col = schema.column(cand.col);
      const int decimals = col.fixed_decimals > 0 ? col.fixed_decimals : 0;
      double cited = decimals > 0
                         ? std::llround(cand.mean * std::pow(10.0, decimals)) /
                               std::pow(10.0, decimals)
                         : static_cast<double>(std::llround(cand.mean));
      if (corrupt) cited = corrupt_value(cited, rng);
      s << "Across the window, the " << phrase_of(col) << " averaged "
        << render_value(cited, decimals) << " per day.";
      truth.column = cand.col;
    }
    truth.sentence = s.str();
    reply.claims.push_back(truth);
    numbered << ++line << ". " << truth.sentence << "\n";
  }

  std::ostringstream trend_par;
  for (std::size_t i = 0; i < 2 && !trends.empty(); ++i) {
    const std::size_t pick = rng.index(trends.size());
    const TrendCand cand = trends[pick];
    trends.erase(trends.begin() + static_cast<std::ptrdiff_t>(pick));
    const bool corrupt = rng.chance(policy.trend_error_rate);
    const bool positive = corrupt ? !cand.positive : cand.positive;
    const std::string phrase = phrase_of(schema.column(cand.col));

    TruthClaim truth;
    truth.numeric = false;
    truth.column = cand.col;
    truth.corrupted = corrupt;
    std::ostringstream s;
    switch (cand.kind) {
      case TrendCandKind::Slope:
        s << "Overall, the " << phrase << " "
          << (positive ? "increased" : "decreased") << " over the window.";
        break;
      case TrendCandKind::Variability:
        s << "Day to day, the " << phrase << " "
          << (positive ? "fluctuated sharply" : "stayed stable") << ".";
        break;
      case TrendCandKind::ExtremumDate: {
        std::size_t row = cand.row;
        if (corrupt) {
          // cite a day that does not hold the maximum
          const double ext = *window.at(cand.row, cand.col);
          std::size_t probe = rng.index(window.days());
          for (std::size_t k = 0; k < window.days(); ++k) {
            const std::size_t r = (probe + k) % window.days();
            if (window.at(r, cand.col) && *window.at(r, cand.col) != ext) {
              row = r;
              break;
            }
          }
        }
        s << "The highest " << phrase << " of the window occurred on "
          << iso(row) << ".";
        break;
      }
      case TrendCandKind::AboveAverage:
        s << "On " << iso(cand.row) << ", the " << phrase << " was well "
          << (positive ? "above" : "below") << " the window average.";
        break;
    }
    truth.sentence = s.str();
    reply.claims.push_back(truth);
    if (i > 0) trend_par << " ";
    trend_par << truth.sentence;
  }

  bool yes = false;
  switch (policy.answer_mode) {
    case AnswerMode::AlwaysNo: yes = false; break;
    case AnswerMode::AlwaysYes: yes = true; break;
    case AnswerMode::OracleLabel:
      if (!oracle_label) {
        throw InvalidSpec("oracle answer mode needs the sample label");
      }
      yes = *oracle_label == ClassLabel::Positive;
      break;
    case AnswerMode::Coin: yes = rng.chance(0.5); break;
  }
  reply.decision = yes ? Decision::Yes : Decision::No;

  std::ostringstream text;
  text << "Looking over the collected window:\n\n";
  text << numbered.str();
  const std::string trends_text = trend_par.str();
  if (!trends_text.empty()) text << "\n" << trends_text << "\n";
  text << "\nBest Guess if Experiencing "
       << (target == Target::Depression ? "Depression" : "Anxiety") << ": "
       << (yes ? "Yes" : "No");
  reply.text = text.str();
  return reply;
}

std::string MockBackend::complete(const std::string& prompt,
                                  const RequestContext& context) {
  if (context.window == nullptr) {
    throw InvalidSpec("mock backend needs a window in the request context");
  }
  MockReply reply =
      mock_reason(policy_, *context.window, fnv1a64(prompt),
                  context.oracle_label, context.target);
  log_.push_back(reply);
  return log_.back().text;
}

}  // namespace phenollm
