#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "phenollm/claims.hpp"
#include "phenollm/window.hpp"

namespace phenollm {

enum class Verdict { Consistent, Inconsistent, Unverifiable };

const char* verdict_name(Verdict v);

struct ClaimCheck {
  bool numeric = true;  // false for trend claims
  Verdict verdict = Verdict::Unverifiable;
  std::string detail;    // what was compared and what the table held
  std::string sentence;  // evidence span from the reply
};

struct VerifyOptions {
  // Relative gap under which both directions of a trend count as consistent.
  double trend_margin = 0.02;
  // Coefficient-of-variation cutoffs; between them both variability
  // judgements are accepted.
  double cv_low = 0.15;
  double cv_high = 0.35;
};

// Four-point grading of a reasoning reply against its window:
//   q1 cites numeric data, q2 all numeric citations check out,
//   q3 cites trends,       q4 all trend citations check out.
// Unverifiable claims fail q2/q4: a claim the table cannot support is not
// grounded.
struct VerificationReport {
  bool q1 = false;
  bool q2 = false;
  bool q3 = false;
  bool q4 = false;
  std::vector<ClaimCheck> checks;

  std::size_t count(bool numeric, Verdict v) const;
};

VerificationReport verify_claims(const ExtractedClaims& claims,
                                 const FeatureWindow& window,
                                 const VerifyOptions& options = {});

struct GradedResponse {
  Classification classification;
  ExtractedClaims claims;
  VerificationReport report;
};

GradedResponse grade_response(const std::string& reply,
                              const FeatureWindow& window,
                              const VerifyOptions& options = {});

// Plain-text rendering: rubric line per question, then one line per check.
std::string annotate_report(const GradedResponse& graded);

}  // namespace phenollm
