#include "judgebench/providers.hpp"

#include <cstdlib>

#include "http_client.hpp"
#include "judgebench/errors.hpp"
#include "judgebench/generator.hpp"
#include "judgebench/oracle.hpp"
#include "judgebench/strategies.hpp"

namespace judgebench {

// ---------------------------------------------------------------------------
// HTTP

HttpChatProvider::HttpChatProvider(HttpProviderConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) throw ConfigError("provider endpoint is empty");
  if (config_.model_id.empty()) throw ConfigError("provider model_id is empty");
}

nlohmann::json HttpChatProvider::wire_body(const ChatRequest& request) const {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  nlohmann::json body{{"model", request.model_id.empty() ? config_.model_id : request.model_id},
                      {"messages", std::move(messages)}};
  if (config_.capabilities.supports_temperature) body["temperature"] = request.temperature;
  if (request.max_output_tokens) body["max_tokens"] = *request.max_output_tokens;
  return body;
}

ChatResponse HttpChatProvider::send(const ChatRequest& request) {
  detail::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
    headers.emplace_back("Authorization", std::string("Bearer ") + key);
  const auto res = detail::http_post_json(config_.endpoint, headers, wire_body(request).dump(), config_.timeout_s);
  if (res.status == 0) {
    if (res.timed_out) throw Timeout(res.error);
    throw ProviderError(0, res.error);
  }
  if (res.status != 200) throw ProviderError(res.status, res.body);

  const auto j = nlohmann::json::parse(res.body, nullptr, false);
  if (j.is_discarded() || !j.contains("choices") || !j["choices"].is_array() || j["choices"].empty())
    throw ProviderError(res.status, "response has no choices: " + res.body.substr(0, 200));
  const auto& message = j["choices"][0].value("message", nlohmann::json::object());
  ChatResponse out;
  out.content = message.value("content", "");
  if (j.contains("usage") && j["usage"].is_object()) {
    out.input_tokens = j["usage"].value("prompt_tokens", std::int64_t{0});
    out.output_tokens = j["usage"].value("completion_tokens", std::int64_t{0});
  } else {
    out.input_tokens = estimate_tokens(request);
    out.output_tokens = estimate_tokens(out.content);
    out.tokens_estimated = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scripted

ScriptedMock::ScriptedMock(std::string model_id, KeyMode mode) : model_id_(std::move(model_id)), mode_(mode) {}

ScriptedMock& ScriptedMock::script(const std::string& key, std::vector<Step> steps) {
  std::lock_guard lock(mu_);
  auto& q = queues_[mode_ == KeyMode::Sequential ? std::string() : key];
  for (auto& s : steps) q.push_back(std::move(s));
  return *this;
}

std::string ScriptedMock::key_for(const ChatRequest& request) const {
  switch (mode_) {
    case KeyMode::Fingerprint: return fingerprint(request);
    case KeyMode::SystemPrompt:
      return request.messages.front().role == Role::System ? request.messages.front().content : std::string();
    case KeyMode::Sequential: return {};
  }
  return {};
}

ChatResponse ScriptedMock::send(const ChatRequest& request) {
  Step step;
  {
    std::lock_guard lock(mu_);
    seen_.push_back(request);
    const auto key = key_for(request);
    auto it = queues_.find(key);
    if (it == queues_.end() || it->second.empty())
      throw Error("scripted mock '" + model_id_ + "' has no step left for key '" + key.substr(0, 60) + "'");
    step = std::move(it->second.front());
    it->second.pop_front();
  }
  if (auto* f = std::get_if<Failure>(&step)) throw ProviderError(f->status, f->body);
  if (std::holds_alternative<TimeoutStep>(step)) throw Timeout("scripted timeout");
  const auto& r = std::get<Reply>(step);
  return ChatResponse{r.content, r.input_tokens, r.output_tokens, 0.0, false, 1};
}

int ScriptedMock::calls() const {
  std::lock_guard lock(mu_);
  return static_cast<int>(seen_.size());
}

std::vector<ChatRequest> ScriptedMock::requests() const {
  std::lock_guard lock(mu_);
  return seen_;
}

std::string ScriptedMock::verdict_json(bool decision, std::optional<double> confidence) {
  nlohmann::json j{{"decision", decision}, {"explanation", decision ? "all constraints met" : "a constraint is violated"}};
  if (confidence) j["confidence"] = *confidence;
  return j.dump();
}

// ---------------------------------------------------------------------------
// Oracle

namespace {

/// Payload of the last line starting with `prefix` across user messages.
std::optional<std::string> last_marked_line(const ChatRequest& request, std::string_view prefix) {
  std::optional<std::string> found;
  for (const auto& m : request.messages) {
    if (m.role != Role::User) continue;
    std::string_view text = m.content;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto end = text.find('\n', pos);
      const auto line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
      if (line.substr(0, prefix.size()) == prefix) found = std::string(line.substr(prefix.size()));
      if (end == std::string_view::npos) break;
      pos = end + 1;
    }
  }
  return found;
}

bool wants_confidence(const ChatRequest& request) {
  for (const auto& m : request.messages)
    if (m.role == Role::User && m.content.find("\"confidence\"") != std::string::npos) return true;
  return false;
}

}  // namespace

OracleMock::OracleMock(std::vector<UserBlock> users, std::shared_ptr<const TravelTimeEstimator> travel,
                       std::string model_id)
    : model_id_(std::move(model_id)), travel_(std::move(travel)) {
  if (!travel_) throw ConfigError("oracle mock needs a travel estimator");
  for (auto& u : users) {
    auto key = render_user_block(u).dump();
    users_.emplace(std::move(key), std::move(u));
  }
}

bool OracleMock::oracle_decision(const ChatRequest& request) const {
  const auto user_line = last_marked_line(request, kUserBlockPrefix);
  const auto system_line = last_marked_line(request, kRecommendationPrefix);
  if (!user_line || !system_line) throw Error("oracle mock: prompt carries no user block / recommendation");
  const auto user_json = nlohmann::ordered_json::parse(*user_line, nullptr, false);
  const auto system_json = nlohmann::json::parse(*system_line, nullptr, false);
  if (user_json.is_discarded() || system_json.is_discarded()) throw Error("oracle mock: blocks are not JSON");
  const auto it = users_.find(user_json.dump());
  if (it == users_.end()) throw Error("oracle mock: unknown user block");
  return judge_pair(it->second, parse_rendered_system_block(system_json), *travel_).correct;
}

ChatResponse OracleMock::send(const ChatRequest& request) {
  const bool decision = adjust(oracle_decision(request), request);
  ChatResponse out;
  out.content = ScriptedMock::verdict_json(decision, wants_confidence(request) ? std::optional(1.0) : std::nullopt);
  out.input_tokens = estimate_tokens(request);
  out.output_tokens = estimate_tokens(out.content);
  out.tokens_estimated = true;
  return out;
}

NoisyOracleMock::NoisyOracleMock(std::vector<UserBlock> users, std::shared_ptr<const TravelTimeEstimator> travel,
                                 double q, std::uint64_t seed, std::string model_id)
    : OracleMock(std::move(users), std::move(travel), std::move(model_id)), q_(q), seed_(seed) {
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("noise probability must be in [0, 1]");
}

bool NoisyOracleMock::adjust(bool decision, const ChatRequest& request) {
  const auto fp = fingerprint(request);
  std::uint64_t nth = 0;
  {
    std::lock_guard lock(mu_);
    nth = counters_[fp]++;
  }
  auto rng = Rng::derive(seed_, std::stoull(fp, nullptr, 16), nth);
  return rng.unit() < q_ ? !decision : decision;
}

}  // namespace judgebench
