#include "phenollm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "phenollm/errors.hpp"

namespace phenollm {

namespace {

// A cited value matches a cell when both round the same at the precision
// the reply used. Unit hints convert the cited value into table units.
double unit_factor(const std::string& hint, const std::string& col_unit) {
  if ((hint == "hours") && col_unit == "minutes") return 60.0;
  if ((hint == "kilometers") && col_unit == "meters") return 1000.0;
  return 1.0;
}

bool value_matches(double cell, const NumericClaim& claim,
                   const std::string& col_unit) {
  const double factor = unit_factor(claim.unit_hint, col_unit);
  const double scale = std::pow(10.0, claim.cited_decimals);
  return std::llround(cell / factor * scale) == std::llround(claim.value * scale);
}

std::string fmt_value(double v) {
  char buf[64];
  if (v == std::floor(v) && std::fabs(v) < 1e15) {
    std::snprintf(buf, sizeof(buf), "%.0f", v);
  } else {
    std::snprintf(buf, sizeof(buf), "%.4f", v);
  }
  return buf;
}

struct ResolvedDate {
  std::optional<std::size_t> row;
  bool cited = false;      // a date was written in the claim
  bool in_window = true;   // false when cited but absent from the window
  std::string text;
};

ResolvedDate resolve_date(const std::optional<DateRef>& ref,
                          const FeatureWindow& window) {
  ResolvedDate out;
  if (!ref) return out;
  out.cited = true;
  out.text = ref->text;
  if (ref->year) {
    try {
      Date d(*ref->year, ref->month, ref->day);
      out.row = window.row_of(d);
    } catch (const MalformedDate&) {
      out.in_window = false;
      return out;
    }
    out.in_window = out.row.has_value();
    return out;
  }
  // Year-less mention: match month/day against the window's own dates.
  for (std::size_t i = 0; i < window.days(); ++i) {
    if (window.dates()[i].month() == ref->month &&
        window.dates()[i].day() == ref->day) {
      out.row = i;
      return out;
    }
  }
  out.in_window = false;
  return out;
}

std::vector<double> present_values(const FeatureWindow& window, std::size_t col,
                                   std::size_t row_begin, std::size_t row_end) {
  std::vector<double> out;
  for (std::size_t r = row_begin; r < row_end; ++r) {
    if (window.at(r, col)) out.push_back(*window.at(r, col));
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Population coefficient of variation; all-zero data has no spread.
double cov_of(const std::vector<double>& v) {
  const double mu = mean_of(v);
  if (mu == 0.0) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size())) / mu;
}

// Relative gap between two scope-half means, symmetric in its arguments.
double relative_gap(double m1, double m2) {
  const double denom = std::max(std::fabs(m1), std::fabs(m2));
  if (denom == 0.0) return 0.0;
  return std::fabs(m2 - m1) / denom;
}

const char* column_name(const FeatureWindow& window, std::size_t col) {
  return window.schema()->column(col).header_name.c_str();
}

ClaimCheck check_numeric(const NumericClaim& claim, const FeatureWindow& window) {
  ClaimCheck check;
  check.numeric = true;
  check.sentence = claim.sentence;
  const auto& schema = *window.schema();
  std::ostringstream detail;

  const ResolvedDate date = resolve_date(claim.date, window);
  if (date.cited && !date.in_window) {
    check.verdict = Verdict::Inconsistent;
    check.detail = "cited date " + date.text + " is outside the window";
    return check;
  }

  const std::string col_unit =
      claim.column ? schema.column(*claim.column).unit : std::string();

  if (claim.kind == NumericKind::PointValue) {
    if (claim.column && date.row) {
      const auto& cell = window.at(*date.row, *claim.column);
      detail << column_name(window, *claim.column) << " on "
             << window.dates()[*date.row].iso();
      if (!cell) {
        check.verdict = Verdict::Inconsistent;
        detail << " has no recorded value, reply cites " << claim.value_text;
      } else if (value_matches(*cell, claim, col_unit)) {
        check.verdict = Verdict::Consistent;
        detail << " is " << fmt_value(*cell) << ", matches " << claim.value_text;
      } else {
        check.verdict = Verdict::Inconsistent;
        detail << " is " << fmt_value(*cell) << ", reply cites "
               << claim.value_text;
      }
    } else if (claim.column) {
      const auto values = present_values(window, *claim.column, 0, window.days());
      const bool any = std::any_of(values.begin(), values.end(), [&](double v) {
        return value_matches(v, claim, col_unit);
      });
      check.verdict = any ? Verdict::Consistent : Verdict::Inconsistent;
      detail << claim.value_text << (any ? " appears in " : " never appears in ")
             << column_name(window, *claim.column);
    } else if (date.row) {
      bool any = false;
      for (std::size_t c = 0; c < schema.size(); ++c) {
        const auto& cell = window.at(*date.row, c);
        if (cell && value_matches(*cell, claim, schema.column(c).unit)) any = true;
      }
      check.verdict = any ? Verdict::Consistent : Verdict::Inconsistent;
      detail << claim.value_text << (any ? " appears on " : " never appears on ")
             << window.dates()[*date.row].iso();
    } else {
      bool any = false;
      for (std::size_t c = 0; c < schema.size() && !any; ++c) {
        for (std::size_t r = 0; r < window.days() && !any; ++r) {
          const auto& cell = window.at(r, c);
          if (cell && value_matches(*cell, claim, schema.column(c).unit))
            any = true;
        }
      }
      check.verdict = any ? Verdict::Consistent : Verdict::Inconsistent;
      detail << claim.value_text
             << (any ? " appears in the table" : " never appears in the table");
    }
    check.detail = detail.str();
    return check;
  }

  // Extremum and aggregate claims are about a whole column.
  if (!claim.column) {
    check.verdict = Verdict::Unverifiable;
    check.detail = "no column could be resolved for " + claim.value_text;
    return check;
  }
  const auto values = present_values(window, *claim.column, 0, window.days());
  if (values.empty()) {
    check.verdict = Verdict::Unverifiable;
    check.detail = std::string(column_name(window, *claim.column)) +
                   " has no recorded values";
    return check;
  }

  if (claim.kind == NumericKind::Extremum) {
    const bool want_max = claim.direction == ExtremumDir::Max;
    const double ext = want_max ? *std::max_element(values.begin(), values.end())
                                : *std::min_element(values.begin(), values.end());
    detail << (want_max ? "max of " : "min of ")
           << column_name(window, *claim.column) << " is " << fmt_value(ext);
    NumericClaim plain = claim;
    plain.kind = NumericKind::PointValue;
    if (!value_matches(ext, claim, col_unit)) {
      check.verdict = Verdict::Inconsistent;
      detail << ", reply cites " << claim.value_text;
    } else if (date.row) {
      const auto& cell = window.at(*date.row, *claim.column);
      if (cell && *cell == ext) {
        check.verdict = Verdict::Consistent;
        detail << " on " << window.dates()[*date.row].iso();
      } else {
        check.verdict = Verdict::Inconsistent;
        detail << ", not on the cited " << date.text;
      }
    } else {
      check.verdict = Verdict::Consistent;
      detail << ", matches " << claim.value_text;
    }
    check.detail = detail.str();
    return check;
  }

  // Aggregate
  double agg = 0.0;
  for (double v : values) agg += v;
  if (claim.aggregate == AggregateKind::Mean) {
    agg /= static_cast<double>(values.size());
  }
  detail << (claim.aggregate == AggregateKind::Mean ? "mean of " : "sum of ")
         << column_name(window, *claim.column) << " is " << fmt_value(agg);
  if (value_matches(agg, claim, col_unit)) {
    check.verdict = Verdict::Consistent;
    detail << ", matches " << claim.value_text;
  } else {
    check.verdict = Verdict::Inconsistent;
    detail << ", reply cites " << claim.value_text;
  }
  check.detail = detail.str();
  return check;
}

ClaimCheck check_trend(const TrendClaim& claim, const FeatureWindow& window,
                       const VerifyOptions& options) {
  ClaimCheck check;
  check.numeric = false;
  check.sentence = claim.sentence;
  std::ostringstream detail;

  if (!claim.column) {
    check.verdict = Verdict::Unverifiable;
    check.detail = "no column could be resolved for the trend";
    return check;
  }
  const char* col = column_name(window, *claim.column);

  // Scope rows.
  std::size_t begin = 0, end = window.days();
  if (claim.scope == TrendScope::FirstHalf) {
    end = window.days() / 2;
  } else if (claim.scope == TrendScope::SecondHalf) {
    begin = window.days() / 2;
  } else if (claim.scope == TrendScope::DateRange) {
    const ResolvedDate a = resolve_date(claim.date, window);
    const ResolvedDate b = resolve_date(claim.range_end, window);
    if ((a.cited && !a.in_window) || (b.cited && !b.in_window)) {
      check.verdict = Verdict::Inconsistent;
      check.detail = "cited date range falls outside the window";
      return check;
    }
    if (!a.row || !b.row) {
      check.verdict = Verdict::Unverifiable;
      check.detail = "date range endpoints could not be resolved";
      return check;
    }
    begin = std::min(*a.row, *b.row);
    end = std::max(*a.row, *b.row) + 1;
  }

  if (claim.kind == TrendKind::ExtremumAtDate) {
    const ResolvedDate date = resolve_date(claim.date, window);
    if (date.cited && !date.in_window) {
      check.verdict = Verdict::Inconsistent;
      check.detail = "cited date " + date.text + " is outside the window";
      return check;
    }
    if (!date.row) {
      check.verdict = Verdict::Unverifiable;
      check.detail = "no date could be resolved for the extremum";
      return check;
    }
    const auto values = present_values(window, *claim.column, begin, end);
    if (values.empty()) {
      check.verdict = Verdict::Unverifiable;
      check.detail = std::string(col) + " has no recorded values in scope";
      return check;
    }
    const bool want_max = claim.direction == ExtremumDir::Max;
    const double ext = want_max ? *std::max_element(values.begin(), values.end())
                                : *std::min_element(values.begin(), values.end());
    const auto& cell = window.at(*date.row, *claim.column);
    detail << (want_max ? "max of " : "min of ") << col << " is "
           << fmt_value(ext);
    if (cell && *cell == ext && *date.row >= begin && *date.row < end) {
      check.verdict = Verdict::Consistent;
      detail << ", on the cited " << window.dates()[*date.row].iso();
    } else {
      check.verdict = Verdict::Inconsistent;
      detail << ", not on the cited " << date.text;
    }
    check.detail = detail.str();
    return check;
  }

  if (claim.kind == TrendKind::AboveBelowAverage) {
    const auto all = present_values(window, *claim.column, 0, window.days());
    if (all.empty()) {
      check.verdict = Verdict::Unverifiable;
      check.detail = std::string(col) + " has no recorded values";
      return check;
    }
    const double avg = mean_of(all);
    double observed = 0.0;
    std::string what;
    const ResolvedDate date = resolve_date(claim.date, window);
    if (date.cited && !date.in_window) {
      check.verdict = Verdict::Inconsistent;
      check.detail = "cited date " + date.text + " is outside the window";
      return check;
    }
    if (date.row) {
      const auto& cell = window.at(*date.row, *claim.column);
      if (!cell) {
        check.verdict = Verdict::Unverifiable;
        check.detail = std::string(col) + " has no value on " + date.text;
        return check;
      }
      observed = *cell;
      what = col + std::string(" on ") + window.dates()[*date.row].iso();
    } else if (claim.scope != TrendScope::WholeWindow) {
      const auto scoped = present_values(window, *claim.column, begin, end);
      if (scoped.empty()) {
        check.verdict = Verdict::Unverifiable;
        check.detail = std::string(col) + " has no recorded values in scope";
        return check;
      }
      observed = mean_of(scoped);
      what = std::string("scoped mean of ") + col;
    } else {
      check.verdict = Verdict::Unverifiable;
      check.detail = "nothing to compare against the average";
      return check;
    }
    detail << what << " is " << fmt_value(observed) << ", average "
           << fmt_value(avg);
    if (relative_gap(observed, avg) <= options.trend_margin) {
      check.verdict = Verdict::Consistent;
      detail << " (within margin)";
    } else if ((observed > avg) == claim.above) {
      check.verdict = Verdict::Consistent;
    } else {
      check.verdict = Verdict::Inconsistent;
      detail << ", opposite of the claim";
    }
    check.detail = detail.str();
    return check;
  }

  const auto scoped = present_values(window, *claim.column, begin, end);
  if (scoped.size() < 2) {
    check.verdict = Verdict::Unverifiable;
    check.detail = std::string(col) + " has too few values in scope";
    return check;
  }

  if (claim.kind == TrendKind::Increase || claim.kind == TrendKind::Decrease) {
    // Compare early-half and late-half means of the scope.
    const std::size_t mid = begin + (end - begin) / 2;
    const auto first = present_values(window, *claim.column, begin, mid);
    const auto second = present_values(window, *claim.column, mid, end);
    if (first.empty() || second.empty()) {
      check.verdict = Verdict::Unverifiable;
      check.detail = std::string(col) + " has an empty half in scope";
      return check;
    }
    const double m1 = mean_of(first);
    const double m2 = mean_of(second);
    detail << col << " early mean " << fmt_value(m1) << ", late mean "
           << fmt_value(m2);
    if (relative_gap(m1, m2) <= options.trend_margin) {
      check.verdict = Verdict::Consistent;
      detail << " (flat within margin)";
    } else if ((m2 > m1) == (claim.kind == TrendKind::Increase)) {
      check.verdict = Verdict::Consistent;
    } else {
      check.verdict = Verdict::Inconsistent;
      detail << ", opposite of the claim";
    }
    check.detail = detail.str();
    return check;
  }

  // Variability
  const double cov = cov_of(scoped);
  detail << col << " coefficient of variation " << fmt_value(cov);
  if (claim.kind == TrendKind::HighVariability) {
    check.verdict = cov >= options.cv_low ? Verdict::Consistent
                                          : Verdict::Inconsistent;
    detail << (check.verdict == Verdict::Consistent ? ", high as claimed"
                                                    : ", not high");
  } else {
    check.verdict = cov <= options.cv_high ? Verdict::Consistent
                                           : Verdict::Inconsistent;
    detail << (check.verdict == Verdict::Consistent ? ", low as claimed"
                                                    : ", not low");
  }
  check.detail = detail.str();
  return check;
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Consistent: return "consistent";
    case Verdict::Inconsistent: return "inconsistent";
    case Verdict::Unverifiable: return "unverifiable";
  }
  return "unknown";
}

std::size_t VerificationReport::count(bool numeric, Verdict v) const {
  std::size_t n = 0;
  for (const ClaimCheck& c : checks) {
    if (c.numeric == numeric && c.verdict == v) ++n;
  }
  return n;
}

VerificationReport verify_claims(const ExtractedClaims& claims,
                                 const FeatureWindow& window,
                                 const VerifyOptions& options) {
  VerificationReport report;
  for (const NumericClaim& claim : claims.numeric) {
    report.checks.push_back(check_numeric(claim, window));
  }
  for (const TrendClaim& claim : claims.trends) {
    report.checks.push_back(check_trend(claim, window, options));
  }
  report.q1 = !claims.numeric.empty();
  report.q3 = !claims.trends.empty();
  report.q2 = report.q1;
  report.q4 = report.q3;
  for (const ClaimCheck& c : report.checks) {
    if (c.verdict != Verdict::Consistent) {
      (c.numeric ? report.q2 : report.q4) = false;
    }
  }
  return report;
}

GradedResponse grade_response(const std::string& reply,
                              const FeatureWindow& window,
                              const VerifyOptions& options) {
  GradedResponse graded;
  graded.classification = extract_classification(reply);
  graded.claims = extract_claims(reply, *window.schema());
  graded.report = verify_claims(graded.claims, window, options);
  return graded;
}

std::string annotate_report(const GradedResponse& graded) {
  std::ostringstream out;
  const VerificationReport& r = graded.report;
  auto yn = [](bool b) { return b ? "yes" : "no"; };
  out << "decision: " << decision_name(graded.classification.decision) << "\n";
  out << "q1 cites numeric data: " << yn(r.q1) << "\n";
  out << "q2 numeric citations consistent: " << yn(r.q2) << "\n";
  out << "q3 cites trends: " << yn(r.q3) << "\n";
  out << "q4 trend citations consistent: " << yn(r.q4) << "\n";
  for (const ClaimCheck& c : r.checks) {
    out << "[" << (c.numeric ? "numeric" : "trend") << "]["
        << verdict_name(c.verdict) << "] " << c.detail << " :: " << c.sentence
        << "\n";
  }
  return out.str();
}

}  // namespace phenollm
