#pragma once

// Chat-completions client for live model queries.
//
// Request:  POST {base_url}/chat/completions
//           Authorization: Bearer $<auth_token_env>
//           {"model": ..., "messages": [{"role": "user", "content": prompt}], "temperature": ...}
// Response: choices[0].message.content
//
// Transport failures, 408, 425, 429 and 5xx are retried with exponential backoff.
// 401/403 raise AuthError; any other non-2xx raises HttpStatusError.

#include "memdrift/error.hpp"
#include "memdrift/modelclient.hpp"
#include "memdrift/promptgen.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <exception>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
#include <nlohmann/json.hpp>

namespace memdrift {

struct EndpointConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model_name;
  std::string auth_token_env = "MEMDRIFT_API_KEY";
  std::size_t max_in_flight = 4;
  std::size_t requests_per_minute = 60;
  std::size_t max_retries = 3;
  double timeout_seconds = 120.0;
  double temperature = 0.0;
  double backoff_initial_seconds = 1.0;
  double backoff_max_seconds = 30.0;

  void validate() const {
    if (base_url.find("://") == std::string::npos) throw ConfigError("base_url needs a scheme: " + base_url);
    if (model_name.empty()) throw ConfigError("endpoint model_name is empty");
    if (max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
    if (requests_per_minute < 1) throw ConfigError("requests_per_minute must be >= 1");
    if (!(timeout_seconds > 0.0)) throw ConfigError("timeout must be > 0");
    if (backoff_initial_seconds < 0.0 || backoff_max_seconds < backoff_initial_seconds) {
      throw ConfigError("backoff bounds must satisfy 0 <= initial <= max");
    }
  }
};

inline void to_json(nlohmann::json& j, const EndpointConfig& c) {
  j = {{"base_url", c.base_url},
       {"model_name", c.model_name},
       {"auth_token_env", c.auth_token_env},
       {"max_in_flight", c.max_in_flight},
       {"requests_per_minute", c.requests_per_minute},
       {"max_retries", c.max_retries},
       {"timeout", c.timeout_seconds},
       {"temperature", c.temperature},
       {"backoff_initial", c.backoff_initial_seconds},
       {"backoff_max", c.backoff_max_seconds}};
}

inline void from_json(const nlohmann::json& j, EndpointConfig& c) {
  c = EndpointConfig{};
  auto opt = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  opt("base_url", c.base_url);
  opt("model_name", c.model_name);
  opt("auth_token_env", c.auth_token_env);
  opt("max_in_flight", c.max_in_flight);
  opt("requests_per_minute", c.requests_per_minute);
  opt("max_retries", c.max_retries);
  opt("timeout", c.timeout_seconds);
  opt("temperature", c.temperature);
  opt("backoff_initial", c.backoff_initial_seconds);
  opt("backoff_max", c.backoff_max_seconds);
}

/// Sliding-window limiter: at most `limit` acquisitions in any trailing `window`.
class RateLimiter {
 public:
  using Clock = std::chrono::steady_clock;

  RateLimiter(std::size_t limit, Clock::duration window) : limit_(limit), window_(window) {}

  /// Blocks until a slot is free, then records the issue time and returns it.
  Clock::time_point acquire() {
    std::unique_lock lock(mutex_);
    while (true) {
      auto now = Clock::now();
      while (!recent_.empty() && now - recent_.front() >= window_) recent_.pop_front();
      if (recent_.size() < limit_) {
        recent_.push_back(now);
        return now;
      }
      auto wake = recent_.front() + window_;
      lock.unlock();
      std::this_thread::sleep_until(wake);
      lock.lock();
    }
  }

 private:
  std::size_t limit_;
  Clock::duration window_;
  std::mutex mutex_;
  std::deque<Clock::time_point> recent_;
};

/// Counting gate for requests on the wire.
class InFlightGate {
 public:
  explicit InFlightGate(std::size_t capacity) : capacity_(capacity) {}

  void enter() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return active_ < capacity_; });
    ++active_;
  }

  void leave() {
    {
      std::lock_guard lock(mutex_);
      --active_;
    }
    cv_.notify_one();
  }

 private:
  std::size_t capacity_;
  std::size_t active_ = 0;
  std::mutex mutex_;
  std::condition_variable cv_;
};

namespace detail {

struct SplitUrl {
  std::string scheme_host_port;
  std::string path_prefix;
};

inline SplitUrl split_base_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("base_url needs a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.scheme_host_port = url.substr(0, path_start);
  out.path_prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
  return out;
}

inline bool retryable_status(int status) {
  return status == 408 || status == 425 || status == 429 || (status >= 500 && status <= 599);
}

}  // namespace detail

/// Shared client state: one gate and one limiter cover every concurrent call made through it.
class LiveClient {
 public:
  explicit LiveClient(EndpointConfig config, std::chrono::steady_clock::duration rate_window = std::chrono::minutes(1))
      : config_((config.validate(), std::move(config))),
        url_(detail::split_base_url(config_.base_url)),
        gate_(config_.max_in_flight),
        limiter_(config_.requests_per_minute, rate_window) {}

  const EndpointConfig& config() const noexcept { return config_; }

  /// Number of HTTP requests issued so far, retries included.
  std::size_t requests_issued() const noexcept { return requests_.load(); }

  ModelAnswer query(const TestCase& tc) {
    const char* token = std::getenv(config_.auth_token_env.c_str());
    if (token == nullptr || *token == '\0') {
      throw AuthError("environment variable " + config_.auth_token_env + " is not set");
    }
    const std::string body = nlohmann::json{{"model", config_.model_name},
                                            {"messages", {{{"role", "user"}, {"content", tc.prompt_text}}}},
                                            {"temperature", config_.temperature}}
                                 .dump();
    const auto started = std::chrono::steady_clock::now();
    std::string last_failure;
    for (std::size_t attempt = 0; attempt <= config_.max_retries; ++attempt) {
      if (attempt > 0) backoff(attempt);
      auto outcome = send(body, token);
      if (outcome.content) {
        std::chrono::duration<double> latency = std::chrono::steady_clock::now() - started;
        return ModelAnswer{tc.case_id, *outcome.content, latency.count(), AnswerSource::Live};
      }
      last_failure = outcome.failure;
    }
    throw RetriesExhaustedError(config_.max_retries + 1, "case " + tc.case_id + ": gave up after " +
                                                             std::to_string(config_.max_retries + 1) +
                                                             " attempts; last failure: " + last_failure);
  }

  /// Queries every case on up to max_in_flight worker threads. With a cache, hits are served
  /// from it and fresh answers are appended. Results keep the input order. The first error
  /// stops further dispatch and is rethrown once workers have drained.
  std::vector<ModelAnswer> query_all(std::span<const TestCase> cases, ReplayCache* cache = nullptr) {
    std::vector<ModelAnswer> answers(cases.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
      while (!failed.load()) {
        std::size_t i = next.fetch_add(1);
        if (i >= cases.size()) return;
        try {
          const std::string key = cache_key(cases[i], config_.model_name);
          if (cache) {
            if (auto hit = cache->find(key)) {
              answers[i] = ModelAnswer{cases[i].case_id, *hit, 0.0, AnswerSource::Replay};
              continue;
            }
          }
          answers[i] = query(cases[i]);
          if (cache) cache->append(key, config_.model_name, answers[i].raw_text);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed = true;
        }
      }
    };

    const std::size_t threads = std::min(config_.max_in_flight, std::max<std::size_t>(cases.size(), 1));
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
    return answers;
  }

 private:
  struct Outcome {
    std::optional<std::string> content;
    std::string failure;
  };

  void backoff(std::size_t attempt) {
    double delay = config_.backoff_initial_seconds * std::pow(2.0, static_cast<double>(attempt - 1));
    delay = std::min(delay, config_.backoff_max_seconds);
    thread_local std::mt19937_64 jitter_rng{std::random_device{}()};
    delay *= 0.75 + 0.25 * std::generate_canonical<double, 53>(jitter_rng);
    std::this_thread::sleep_for(std::chrono::duration<double>(delay));
  }

  Outcome send(const std::string& body, const char* token) {
    limiter_.acquire();
    gate_.enter();
    struct Leave {
      InFlightGate& g;
      ~Leave() { g.leave(); }
    } leave{gate_};
    ++requests_;

    httplib::Client client(url_.scheme_host_port);
    const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    httplib::Headers headers = {{"Authorization", std::string("Bearer ") + token}};

    auto res = client.Post(url_.path_prefix + "/chat/completions", headers, body, "application/json");
    if (!res) return {std::nullopt, "transport error: " + httplib::to_string(res.error())};
    const int status = res->status;
    if (status == 401 || status == 403) {
      throw AuthError("endpoint rejected credentials (HTTP " + std::to_string(status) + ")");
    }
    if (detail::retryable_status(status)) return {std::nullopt, "HTTP " + std::to_string(status)};
    if (status < 200 || status > 299) {
      throw HttpStatusError(status, "non-retryable HTTP " + std::to_string(status) + ": " + res->body.substr(0, 200));
    }
    try {
      auto doc = nlohmann::json::parse(res->body);
      return {doc.at("choices").at(0).at("message").at("content").get<std::string>(), {}};
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(std::string("malformed chat-completions response: ") + ex.what());
    }
  }

  EndpointConfig config_;
  detail::SplitUrl url_;
  InFlightGate gate_;
  RateLimiter limiter_;
  std::atomic<std::size_t> requests_{0};
};

inline ModelAnswer query_live(const EndpointConfig& config, const TestCase& tc) {
  LiveClient client(config);
  return client.query(tc);
}

}  // namespace memdrift
