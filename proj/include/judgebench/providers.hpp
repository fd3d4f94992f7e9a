#pragma once

// Concrete chat providers: an OpenAI-compatible HTTP client and the offline
// mocks used for tests and dry runs.

#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "judgebench/domain.hpp"
#include "judgebench/provider.hpp"
#include "judgebench/travel_time.hpp"

namespace judgebench {

struct HttpProviderConfig {
  /// Chat-completions URL, e.g. "https://api.openai.com/v1/chat/completions".
  std::string endpoint;
  std::string model_id;
  /// Environment variable holding the API key (sent as a bearer token).
  std::string api_key_env = "OPENAI_API_KEY";
  double timeout_s = 120.0;
  ModelCapabilities capabilities;
};

/// OpenAI-compatible chat-completions over HTTP(S). Usage numbers come from the
/// response's "usage" object; without one, tokens are estimated.
class HttpChatProvider final : public ChatProvider {
 public:
  explicit HttpChatProvider(HttpProviderConfig config);
  const std::string& model_id() const override { return config_.model_id; }
  ModelCapabilities capabilities() const override { return config_.capabilities; }
  ChatResponse send(const ChatRequest& request) override;

  /// Request body as sent on the wire (temperature omitted when unsupported).
  nlohmann::json wire_body(const ChatRequest& request) const;

 private:
  HttpProviderConfig config_;
};

/// Replays scripted steps. Steps are queued per key; the key is chosen by
/// `KeyMode`: the request fingerprint, the system message (one queue per
/// persona), or a single shared queue consumed in call order.
class ScriptedMock final : public ChatProvider {
 public:
  enum class KeyMode { Fingerprint, SystemPrompt, Sequential };

  struct Reply {
    std::string content;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
  };
  struct Failure {
    int status = 503;
    std::string body = "scripted failure";
  };
  struct TimeoutStep {};
  using Step = std::variant<Reply, Failure, TimeoutStep>;

  explicit ScriptedMock(std::string model_id = "scripted-mock", KeyMode mode = KeyMode::Sequential);

  /// Queue steps under a key (ignored in Sequential mode).
  ScriptedMock& script(const std::string& key, std::vector<Step> steps);
  ScriptedMock& script(std::vector<Step> steps) { return script("", std::move(steps)); }

  const std::string& model_id() const override { return model_id_; }
  ChatResponse send(const ChatRequest& request) override;

  int calls() const;
  std::vector<ChatRequest> requests() const;

  /// {"decision": <d>, "explanation": "..."} with an optional confidence.
  static std::string verdict_json(bool decision, std::optional<double> confidence = std::nullopt);

 private:
  std::string key_for(const ChatRequest& request) const;

  std::string model_id_;
  KeyMode mode_;
  mutable std::mutex mu_;
  std::map<std::string, std::deque<Step>> queues_;
  std::vector<ChatRequest> seen_;
};

/// A perfect judge: locates the judged pair in the prompt, asks the rule
/// oracle, and answers in the requested JSON format (with confidence 1.0 when
/// the prompt asks for one). User preferences are not part of the prompt, so
/// the mock is given the user blocks it may be asked about.
class OracleMock : public ChatProvider {
 public:
  OracleMock(std::vector<UserBlock> users, std::shared_ptr<const TravelTimeEstimator> travel,
             std::string model_id = "oracle-mock");

  const std::string& model_id() const override { return model_id_; }
  ChatResponse send(const ChatRequest& request) override;

  /// The oracle's decision for the pair embedded in `request`. Throws Error if
  /// the prompt carries no recognisable pair.
  bool oracle_decision(const ChatRequest& request) const;

 protected:
  virtual bool adjust(bool decision, const ChatRequest& request) { (void)request; return decision; }

 private:
  std::string model_id_;
  std::shared_ptr<const TravelTimeEstimator> travel_;
  std::unordered_map<std::string, UserBlock> users_;  ///< keyed by rendered user block
};

/// OracleMock whose answer is flipped with probability q. Flips are a pure
/// function of (seed, request fingerprint, n-th call with that fingerprint),
/// so repeated identical prompts (self-consistency) draw independently.
class NoisyOracleMock final : public OracleMock {
 public:
  NoisyOracleMock(std::vector<UserBlock> users, std::shared_ptr<const TravelTimeEstimator> travel, double q,
                  std::uint64_t seed, std::string model_id = "noisy-oracle-mock");

 protected:
  bool adjust(bool decision, const ChatRequest& request) override;

 private:
  double q_;
  std::uint64_t seed_;
  std::mutex mu_;
  std::unordered_map<std::string, std::uint64_t> counters_;
};

}  // namespace judgebench
