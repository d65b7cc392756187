#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "phenollm/window.hpp"

namespace phenollm {

// Side-channel context a backend may consult. Real HTTP backends ignore it;
// the mock uses the window to fabricate grounded reasoning and the oracle
// label to answer with configurable skill.
struct RequestContext {
  const FeatureWindow* window = nullptr;
  std::optional<ClassLabel> oracle_label;
  Target target = Target::Depression;
};

struct CompletionResult {
  std::string text;
  bool from_cache = false;
  int attempts = 1;
};

// Injectable time source so rate limiting and backoff are testable without
// real waiting.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::chrono::steady_clock::time_point now() = 0;
  virtual void sleep_for(std::chrono::milliseconds ms) = 0;
};

class SystemClock : public Clock {
 public:
  std::chrono::steady_clock::time_point now() override;
  void sleep_for(std::chrono::milliseconds ms) override;
};

class FakeClock : public Clock {
 public:
  std::chrono::steady_clock::time_point now() override { return now_; }
  void sleep_for(std::chrono::milliseconds ms) override {
    now_ += ms;
    slept_total_ += ms;
  }
  void advance(std::chrono::milliseconds ms) { now_ += ms; }
  std::chrono::milliseconds slept() const { return slept_total_; }

 private:
  std::chrono::steady_clock::time_point now_{};
  std::chrono::milliseconds slept_total_{0};
};

// Sliding-window limiter: at most max_per_minute acquisitions within any
// trailing 60 seconds. acquire() sleeps on the injected clock until a slot
// opens. max_per_minute == 0 disables limiting.
class RateLimiter {
 public:
  RateLimiter(std::size_t max_per_minute, Clock& clock)
      : max_per_minute_(max_per_minute), clock_(clock) {}
  void acquire();

 private:
  std::size_t max_per_minute_;
  Clock& clock_;
  std::deque<std::chrono::steady_clock::time_point> stamps_;
};

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual std::string model_name() const = 0;
  virtual std::string complete(const std::string& prompt,
                               const RequestContext& context) = 0;
};

// FNV-1a, the cache and transcript key for prompts.
std::uint64_t fnv1a64(std::string_view bytes);
std::string prompt_hash_hex(std::string_view prompt);

struct HttpBackendConfig {
  std::string base_url;  // scheme://host[:port]
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string api_key_env = "LLM_API_KEY";
  double temperature = 0.0;
  int max_attempts = 5;
  int base_backoff_ms = 500;
  int timeout_seconds = 120;
  std::uint64_t jitter_seed = 0;
};

// Chat-completions client. Auth comes from the configured environment
// variable and is checked before any connection is made. Retries 408/429,
// 5xx, timeouts, and connection failures with exponential backoff plus
// jitter; anything else fails fast.
class HttpBackend : public CompletionBackend {
 public:
  HttpBackend(HttpBackendConfig config, Clock& clock);

  std::string model_name() const override { return config_.model; }
  std::string complete(const std::string& prompt,
                       const RequestContext& context) override;
  int last_attempts() const { return last_attempts_; }

 private:
  HttpBackendConfig config_;
  Clock& clock_;
  int last_attempts_ = 1;
};

struct GatewayOptions {
  std::string cache_dir;        // empty disables the transcript cache
  bool replay_only = false;     // serve strictly from cache, never call out
  std::size_t max_per_minute = 0;
};

// Front door for completions: transcript cache keyed on (model, prompt
// hash), then rate limit, then backend. replay_only turns a cache miss
// into an error instead of a network call.
class Gateway {
 public:
  Gateway(std::shared_ptr<CompletionBackend> backend, GatewayOptions options,
          Clock& clock);

  CompletionResult complete(const std::string& prompt,
                            const RequestContext& context);
  const std::string& model_name() const { return model_; }

 private:
  std::string cache_path(const std::string& hash_hex) const;

  std::shared_ptr<CompletionBackend> backend_;
  GatewayOptions options_;
  std::string model_;
  RateLimiter limiter_;
};

}  // namespace phenollm
