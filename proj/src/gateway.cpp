#include "phenollm/gateway.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "phenollm/errors.hpp"
#include "phenollm/rng.hpp"

namespace phenollm {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string prompt_hash_hex(std::string_view prompt) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(prompt)));
  return buf;
}

std::chrono::steady_clock::time_point SystemClock::now() {
  return std::chrono::steady_clock::now();
}

void SystemClock::sleep_for(std::chrono::milliseconds ms) {
  std::this_thread::sleep_for(ms);
}

void RateLimiter::acquire() {
  if (max_per_minute_ == 0) return;
  using namespace std::chrono_literals;
  for (;;) {
    const auto now = clock_.now();
    while (!stamps_.empty() && now - stamps_.front() >= 60s) {
      stamps_.pop_front();
    }
    if (stamps_.size() < max_per_minute_) {
      stamps_.push_back(now);
      return;
    }
    const auto until_free = 60s - (now - stamps_.front());
    clock_.sleep_for(
        std::chrono::duration_cast<std::chrono::milliseconds>(until_free) +
        1ms);
  }
}

// ----- HTTP backend -----

HttpBackend::HttpBackend(HttpBackendConfig config, Clock& clock)
    : config_(std::move(config)), clock_(clock) {
  if (config_.base_url.empty()) throw InvalidSpec("backend base_url is empty");
  if (config_.model.empty()) throw InvalidSpec("backend model is empty");
}

namespace {

bool retryable_status(int status) {
  return status == 408 || status == 429 || status >= 500;
}

std::string parse_completion(const std::string& body) {
  json parsed;
  try {
    parsed = json::parse(body);
  } catch (const json::exception& e) {
    throw Error(std::string("malformed completion response: ") + e.what());
  }
  if (!parsed.contains("choices") || !parsed["choices"].is_array() ||
      parsed["choices"].empty()) {
    throw Error("completion response has no choices");
  }
  const json& first = parsed["choices"][0];
  if (!first.contains("message") || !first["message"].contains("content")) {
    throw Error("completion response choice has no message content");
  }
  return first["message"]["content"].get<std::string>();
}

}  // namespace

std::string HttpBackend::complete(const std::string& prompt,
                                  const RequestContext&) {
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw AuthFailure("environment variable " + config_.api_key_env +
                      " is not set");
  }

  const json body = {
      {"model", config_.model},
      {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", config_.temperature},
  };
  const std::string payload = body.dump();

  Rng jitter(derive_seed(config_.jitter_seed, {fnv1a64(prompt)}));
  std::string last_detail;
  bool last_was_timeout = false;
  const int attempts = std::max(1, config_.max_attempts);

  for (int attempt = 1; attempt <= attempts; ++attempt) {
    last_attempts_ = attempt;
    httplib::Client client(config_.base_url);
    if (!client.is_valid()) {
      throw Error("invalid backend url: " + config_.base_url);
    }
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_write_timeout(config_.timeout_seconds, 0);
    client.set_bearer_token_auth(key);

    auto res = client.Post(config_.path, payload, "application/json");
    if (res) {
      if (res->status == 200) return parse_completion(res->body);
      if (res->status == 401 || res->status == 403) {
        throw AuthFailure("backend rejected credentials (http " +
                          std::to_string(res->status) + ")");
      }
      if (!retryable_status(res->status)) {
        throw Error("backend error http " + std::to_string(res->status) + ": " +
                    res->body);
      }
      last_detail = "http " + std::to_string(res->status);
      last_was_timeout = false;
    } else {
      const auto err = res.error();
      last_was_timeout = err == httplib::Error::ConnectionTimeout ||
                         err == httplib::Error::Read ||
                         err == httplib::Error::Write;
      last_detail = std::string("transport: ") + httplib::to_string(err);
    }

    if (attempt < attempts) {
      const std::int64_t base = config_.base_backoff_ms;
      const std::int64_t backoff = base << (attempt - 1);
      const std::int64_t with_jitter =
          backoff + static_cast<std::int64_t>(
                        jitter.below(static_cast<std::uint64_t>(base) + 1));
      clock_.sleep_for(std::chrono::milliseconds(with_jitter));
    }
  }
  if (last_was_timeout) {
    throw Timeout("after " + std::to_string(attempts) +
                  " attempts: " + last_detail);
  }
  throw ExhaustedRetries(last_detail, attempts);
}

// ----- gateway -----

namespace {

// Model names can contain path separators; keep cache paths flat and safe.
std::string sanitize_component(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    out += ok ? c : '_';
  }
  return out.empty() ? std::string("model") : out;
}

}  // namespace

Gateway::Gateway(std::shared_ptr<CompletionBackend> backend,
                 GatewayOptions options, Clock& clock)
    : backend_(std::move(backend)),
      options_(std::move(options)),
      limiter_(options_.max_per_minute, clock) {
  if (!backend_) throw InvalidSpec("gateway needs a backend");
  model_ = backend_->model_name();
}

std::string Gateway::cache_path(const std::string& hash_hex) const {
  return (fs::path(options_.cache_dir) / sanitize_component(model_) /
          (hash_hex + ".json"))
      .string();
}

CompletionResult Gateway::complete(const std::string& prompt,
                                   const RequestContext& context) {
  const std::string hash = prompt_hash_hex(prompt);

  if (!options_.cache_dir.empty()) {
    const std::string path = cache_path(hash);
    std::ifstream in(path);
    if (in) {
      json entry;
      try {
        in >> entry;
      } catch (const json::exception& e) {
        throw IoFailure("unreadable cache entry " + path + ": " + e.what());
      }
      if (entry.value("prompt", "") == prompt) {
        CompletionResult result;
        result.text = entry.value("reply", "");
        result.from_cache = true;
        result.attempts = 0;
        return result;
      }
      // hash collision: fall through to the backend
    }
  }

  if (options_.replay_only) {
    throw IoFailure("replay-only mode has no cached reply for model " + model_ +
                    ", prompt " + hash);
  }

  limiter_.acquire();
  CompletionResult result;
  result.text = backend_->complete(prompt, context);
  result.from_cache = false;

  if (!options_.cache_dir.empty()) {
    const fs::path path = cache_path(hash);
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoFailure("cannot create cache dir: " + ec.message());
    const json entry = {{"model", model_},
                        {"prompt_hash", hash},
                        {"prompt", prompt},
                        {"reply", result.text}};
    const fs::path tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp);
      if (!out) throw IoFailure("cannot write cache entry " + tmp.string());
      out << entry.dump(2) << "\n";
    }
    fs::rename(tmp, path, ec);
    if (ec) throw IoFailure("cannot finalize cache entry: " + ec.message());
  }
  return result;
}

}  // namespace phenollm
