#pragma once

// Chat-completion provider abstraction: requests, responses, retries, the
// per-attempt run log, token pricing and the global in-flight limit.

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace judgebench {

enum class Role { System, User, Assistant };

std::string_view to_string(Role r) noexcept;

struct ChatMessage {
  Role role = Role::User;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
  std::string model_id;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  std::optional<int> max_output_tokens;
};

/// Throws Error when messages are empty, the first role is assistant, or the
/// temperature is negative.
void validate(const ChatRequest& request);

/// Stable 16-hex-digit FNV-1a hash over model, temperature and messages.
std::string fingerprint(const ChatRequest& request);

struct ChatResponse {
  std::string content;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  double latency_ms = 0.0;
  /// Token counts come from the whitespace fallback, not a provider usage report.
  bool tokens_estimated = false;
  /// Attempts spent by complete() to obtain this response.
  int attempts = 1;
};

/// Whitespace-delimited word count; the fallback when a provider reports no usage.
std::int64_t estimate_tokens(std::string_view text) noexcept;
std::int64_t estimate_tokens(const ChatRequest& request) noexcept;

struct ModelCapabilities {
  /// Some reasoning models reject the temperature field; it is then omitted on the wire.
  bool supports_temperature = true;
};

/// A chat-completion backend. send() performs exactly one attempt and throws
/// ProviderError (or Timeout) on failure. Implementations must tolerate
/// concurrent send() calls.
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual const std::string& model_id() const = 0;
  virtual ModelCapabilities capabilities() const { return {}; }
  virtual ChatResponse send(const ChatRequest& request) = 0;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_delay{500};
  double multiplier = 2.0;
  /// Decides whether a failed attempt may be retried. Defaults to
  /// is_transient() for ProviderError and false for anything else.
  std::function<bool(const std::exception&)> retryable;
  /// Injected for tests; defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;

  /// Delay before attempt `attempt + 1` (attempt is 1-based).
  std::chrono::milliseconds delay_after(int attempt) const;
  bool is_retryable(const std::exception& e) const;
  void wait(std::chrono::milliseconds d) const;
};

/// Timeouts, transport failures (status 0), 408, 429 and 5xx.
bool is_transient(const std::exception& e) noexcept;

/// Append-only JSONL log of every provider attempt. Thread-safe. Entries are
/// also kept in memory so a run can reconcile its accounting.
class RunLog {
 public:
  struct Entry {
    std::string tag;
    std::string fingerprint;
    std::string model_id;
    int attempt = 0;
    std::string outcome;  ///< "ok" | "error" | "parse_error"
    int status = 0;
    double latency_ms = 0.0;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    bool tokens_estimated = false;
    std::string error;
  };

  RunLog() = default;
  /// Appends to `path` (created if missing).
  explicit RunLog(const std::filesystem::path& path);

  void append(Entry entry);
  std::vector<Entry> entries() const;

  static nlohmann::json to_json(const Entry& e);
  static Entry from_json(const nlohmann::json& j);
  static std::vector<Entry> read(const std::filesystem::path& path);

 private:
  mutable std::mutex mu_;
  std::vector<Entry> entries_;
  std::ofstream out_;
};

/// Bounds the number of provider calls in flight across all workers.
class InFlightLimiter {
 public:
  explicit InFlightLimiter(int limit);
  void acquire();
  void release();
  int limit() const noexcept { return limit_; }
  int peak() const;

  class Guard {
   public:
    explicit Guard(InFlightLimiter* l) : l_(l) {
      if (l_) l_->acquire();
    }
    ~Guard() {
      if (l_) l_->release();
    }
    Guard(const Guard&) = delete;
    Guard& operator=(const Guard&) = delete;

   private:
    InFlightLimiter* l_;
  };

 private:
  int limit_;
  int active_ = 0;
  int peak_ = 0;
  mutable std::mutex mu_;
  std::condition_variable cv_;
};

struct CallOptions {
  RetryPolicy policy;
  RunLog* log = nullptr;
  InFlightLimiter* limiter = nullptr;
  /// Copied into every run-log entry (the harness uses the pair id).
  std::string tag;
};

/// Sends `request`, retrying transient failures per the policy. Latency is
/// measured on a monotonic clock around the successful attempt. Throws the
/// last ProviderError once retries are exhausted, or immediately for a
/// non-retryable error.
ChatResponse complete(ChatProvider& provider, const ChatRequest& request, const CallOptions& options);
ChatResponse complete(ChatProvider& provider, const ChatRequest& request, const RetryPolicy& policy);

// ---------------------------------------------------------------------------
// Pricing

/// Exact money amount, stored in 1e-12 USD.
class Usd {
 public:
  constexpr Usd() = default;
  static constexpr Usd from_picos(std::int64_t p) { return Usd(p); }
  /// Parses a plain decimal such as "0.27" or "10" exactly. Throws Error.
  static Usd parse(std::string_view text);

  constexpr std::int64_t picos() const noexcept { return picos_; }
  double to_double() const noexcept { return static_cast<double>(picos_) / 1e12; }
  /// Rounded half-up to `decimals` places (0..12).
  std::string str(int decimals = 6) const;

  constexpr Usd& operator+=(Usd o) noexcept {
    picos_ += o.picos_;
    return *this;
  }
  friend constexpr Usd operator+(Usd a, Usd b) noexcept { return a += b; }
  constexpr auto operator<=>(const Usd&) const = default;

 private:
  constexpr explicit Usd(std::int64_t p) : picos_(p) {}
  std::int64_t picos_ = 0;
};

struct TokenRate {
  Usd per_1m_input;
  Usd per_1m_output;
  bool operator==(const TokenRate&) const = default;
};

class CostTable {
 public:
  void set(const std::string& model_id, TokenRate rate);
  bool contains(const std::string& model_id) const { return rates_.count(model_id) != 0; }
  const TokenRate& at(const std::string& model_id) const;
  const std::map<std::string, TokenRate>& rates() const noexcept { return rates_; }

  /// {"models": {"<id>": {"input_usd_per_1m": "10.00", "output_usd_per_1m": "30.00"}}}
  /// Rates may be JSON strings or numbers.
  static CostTable from_json(const nlohmann::json& j);
  static CostTable load(const std::filesystem::path& path);
  /// Published list prices of July 2025 for the models this benchmark was built around.
  static CostTable july_2025();

 private:
  std::map<std::string, TokenRate> rates_;
};

/// Capabilities recorded in the July 2025 table (temperature support of
/// reasoning models); defaults for models it does not list.
ModelCapabilities known_capabilities(const std::string& model_id);

/// usd = in * in_rate / 1e6 + out * out_rate / 1e6, exact to 1e-12 USD
/// (rounded half-up at that precision). Throws UnknownModel.
Usd cost_of(const CostTable& table, const std::string& model_id, std::int64_t input_tokens,
            std::int64_t output_tokens);

}  // namespace judgebench
