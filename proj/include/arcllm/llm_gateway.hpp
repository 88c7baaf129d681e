#pragma once

#include <condition_variable>
#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace arcllm {

/// Transport or API failure after retries are exhausted.
class GatewayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The replay store has no recording for a request. Deliberately not a
/// GatewayError: callers treat a miss as "cell not run" rather than "unsolved".
class ReplayMiss : public std::runtime_error {
 public:
  explicit ReplayMiss(std::string hash)
      : std::runtime_error("replay miss for request " + hash), hash_(std::move(hash)) {}
  const std::string& hash() const { return hash_; }

 private:
  std::string hash_;
};

/// A recording would overwrite an existing one with different text.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CompletionRequest {
  static constexpr double kTemperature = 0.0;
  static constexpr int kDefaultMaxOutputTokens = 2048;

  std::string model;
  std::string prompt;
  int max_output_tokens = kDefaultMaxOutputTokens;
};

struct Usage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
  friend bool operator==(const Usage&, const Usage&) = default;
};

enum class BackendKind { Live, Replay };

std::string to_string(BackendKind b);
BackendKind parse_backend(std::string_view tag);

struct CompletionResult {
  std::string raw_text;
  std::string model;
  double latency_ms = 0;
  std::optional<Usage> usage;
  BackendKind backend = BackendKind::Replay;
};

/// SHA-256 of model + '\0' + prompt; the replay store key.
std::string request_hash(std::string_view model, std::string_view prompt);

/// Append-only JSON-lines map from request hash to completion. Safe for
/// concurrent lookups; appends are serialized and flushed line by line.
class ReplayStore {
 public:
  /// In-memory only.
  ReplayStore() = default;
  /// Loads `path` if it exists; later appends go to the same file.
  explicit ReplayStore(std::filesystem::path path);

  std::optional<CompletionResult> find(const std::string& hash) const;
  /// No-op when the same text is already recorded; IntegrityError if it differs.
  void record(const CompletionRequest& req, const CompletionResult& result);
  std::size_t size() const;

 private:
  struct Entry {
    std::string model;
    std::string raw_text;
    std::optional<Usage> usage;
  };

  std::optional<std::filesystem::path> path_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, Entry> entries_;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual CompletionResult complete(const CompletionRequest& req) = 0;
  virtual BackendKind kind() const = 0;
};

class ReplayBackend : public Backend {
 public:
  explicit ReplayBackend(std::shared_ptr<const ReplayStore> store) : store_(std::move(store)) {}
  /// Throws ReplayMiss when the request was never recorded.
  CompletionResult complete(const CompletionRequest& req) override;
  BackendKind kind() const override { return BackendKind::Replay; }

 private:
  std::shared_ptr<const ReplayStore> store_;
};

struct HttpResponse {
  int status = 0;
  std::string body;
  /// Parsed Retry-After header, seconds.
  std::optional<double> retry_after_s;
};

/// Thrown by transports for connection-level failures; retried like a 5xx.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// POSTs a JSON body to the completion endpoint.
using HttpTransport = std::function<HttpResponse(const std::string& body)>;

/// httplib-based transport. The key is sent as a bearer token and kept nowhere else.
HttpTransport make_http_transport(const std::string& endpoint_url, std::string api_key,
                                  std::chrono::seconds timeout = std::chrono::seconds(120));

struct LiveOptions {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string api_key_env = "OPENAI_API_KEY";
  int max_in_flight = 4;
  int max_attempts = 5;
  double backoff_base_s = 2.0;
  /// Injected for tests; defaults to std::this_thread::sleep_for.
  std::function<void(double seconds)> sleep;
  /// Injected for tests; defaults to std::chrono::steady_clock::now.
  std::function<std::chrono::steady_clock::time_point()> clock;
};

/// Chat-completion body: one user message, temperature 0.
std::string build_request_body(const CompletionRequest& req);

struct ParsedResponse {
  std::string text;
  std::optional<Usage> usage;
};

/// First choice's message content; GatewayError on malformed bodies.
ParsedResponse parse_response_body(const std::string& body);

class LiveBackend : public Backend {
 public:
  /// `recorder` may be null; when set, every completion is appended to it.
  LiveBackend(LiveOptions options, HttpTransport transport, std::shared_ptr<ReplayStore> recorder);

  /// Reads the API key from `options.api_key_env`; GatewayError when unset.
  static std::unique_ptr<LiveBackend> from_env(LiveOptions options, std::shared_ptr<ReplayStore> recorder);

  CompletionResult complete(const CompletionRequest& req) override;
  BackendKind kind() const override { return BackendKind::Live; }

 private:
  void acquire_slot();
  void release_slot();
  void wait_for_cooldown();
  void extend_cooldown(double seconds);

  LiveOptions options_;
  HttpTransport transport_;
  std::shared_ptr<ReplayStore> recorder_;

  std::mutex mu_;
  std::condition_variable slot_free_;
  int in_flight_ = 0;
  std::chrono::steady_clock::time_point cooldown_until_{};
};

}  // namespace arcllm
