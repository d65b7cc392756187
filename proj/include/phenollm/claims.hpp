#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "phenollm/schema.hpp"

namespace phenollm {

enum class Decision { Yes, No, Unparseable };

const char* decision_name(Decision d);

struct Classification {
  Decision decision = Decision::Unparseable;
  // Text span the decision was read from, empty when unparseable.
  std::string evidence;
};

// Reads the final Yes/No out of a reply. "Best guess"/"answer" phrasings
// win (last one counts); otherwise a standalone Yes or No sentence is
// accepted only when every such mention agrees.
Classification extract_classification(const std::string& reply);

// Calendar reference as written; natural-language mentions ("May 9") have
// no year until resolved against a window.
struct DateRef {
  std::optional<int> year;
  unsigned month = 0;
  unsigned day = 0;
  std::string text;
};

enum class NumericKind { PointValue, Extremum, Aggregate };
enum class ExtremumDir { Max, Min };
enum class AggregateKind { Mean, Sum };

struct NumericClaim {
  NumericKind kind = NumericKind::PointValue;
  double value = 0.0;
  int cited_decimals = 0;          // precision as written
  std::string value_text;          // e.g. "55,755"
  std::optional<std::size_t> column;
  std::optional<DateRef> date;
  ExtremumDir direction = ExtremumDir::Max;  // Extremum only
  AggregateKind aggregate = AggregateKind::Mean;  // Aggregate only
  std::string unit_hint;           // "minutes", "hours", "steps", ...
  std::string sentence;            // evidence
};

enum class TrendKind {
  Increase,
  Decrease,
  ExtremumAtDate,
  AboveBelowAverage,
  HighVariability,
  LowVariability,
};

enum class TrendScope { WholeWindow, FirstHalf, SecondHalf, DateRange };

struct TrendClaim {
  TrendKind kind = TrendKind::Increase;
  std::optional<std::size_t> column;
  TrendScope scope = TrendScope::WholeWindow;
  std::optional<DateRef> date;       // ExtremumAtDate, or DateRange start
  std::optional<DateRef> range_end;  // DateRange only
  ExtremumDir direction = ExtremumDir::Max;  // ExtremumAtDate only
  bool above = true;                 // AboveBelowAverage only
  std::string sentence;
};

struct ExtractedClaims {
  std::vector<NumericClaim> numeric;
  std::vector<TrendClaim> trends;
};

// Pattern-based extraction of checkable statements. Skipped number spans:
// list ordinals, dates and bare years, percentages, hyphenated identifiers
// (PHQ-4), and counts of calendar units. Columns resolve by weighted token
// overlap (rarer tokens count more, unit compatibility boosts) with a
// minimum score and margin; unresolved references stay in the claim with
// no column. Hedged trend sentences ("might indicate...") are not claims.
ExtractedClaims extract_claims(const std::string& reply,
                               const FeatureSchema& schema);

}  // namespace phenollm
