#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phenollm/claims.hpp"
#include "phenollm/gateway.hpp"
#include "phenollm/window.hpp"

namespace phenollm {

enum class AnswerMode { AlwaysNo, AlwaysYes, OracleLabel, Coin };

const char* answer_mode_name(AnswerMode mode);
std::optional<AnswerMode> parse_answer_mode(const std::string& name);

// Deterministic stand-in for a remote model. Replies are a pure function
// of (policy, window, prompt hash): claims are computed from the true
// window statistics, then each one is independently corrupted with the
// configured probability, so ground truth for every emitted claim is known.
struct MockPolicy {
  std::uint64_t seed = 0;
  AnswerMode answer_mode = AnswerMode::OracleLabel;
  double numeric_error_rate = 0.0;
  double trend_error_rate = 0.0;
  std::size_t claims_per_response = 3;
};

struct TruthClaim {
  bool numeric = true;     // false for trend claims
  std::size_t column = 0;
  bool corrupted = false;  // emitted deliberately wrong
  std::string sentence;
};

struct MockReply {
  std::uint64_t prompt_hash = 0;
  std::string text;
  Decision decision = Decision::No;
  std::vector<TruthClaim> claims;  // emission order: numeric, then trends
};

MockReply mock_reason(const MockPolicy& policy, const FeatureWindow& window,
                      std::uint64_t prompt_hash,
                      std::optional<ClassLabel> oracle_label, Target target);

class MockBackend : public CompletionBackend {
 public:
  explicit MockBackend(MockPolicy policy, std::string model = "mock-reasoner")
      : policy_(policy), model_(std::move(model)) {}

  std::string model_name() const override { return model_; }
  std::string complete(const std::string& prompt,
                       const RequestContext& context) override;

  const std::vector<MockReply>& log() const { return log_; }

 private:
  MockPolicy policy_;
  std::string model_;
  std::vector<MockReply> log_;
};

}  // namespace phenollm
