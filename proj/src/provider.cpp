#include "judgebench/provider.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <thread>

#include "judgebench/errors.hpp"
#include "rates_data.hpp"

namespace judgebench {

std::string_view to_string(Role r) noexcept {
  switch (r) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "?";
}

void validate(const ChatRequest& request) {
  if (request.messages.empty()) throw Error("chat request has no messages");
  if (request.messages.front().role == Role::Assistant) throw Error("first message must be system or user");
  if (!(request.temperature >= 0.0)) throw Error("temperature must be >= 0");
  if (request.max_output_tokens && *request.max_output_tokens <= 0) throw Error("max_output_tokens must be positive");
}

namespace {

class Fnv1a {
 public:
  void add(std::string_view s) noexcept {
    for (unsigned char c : s) {
      h_ ^= c;
      h_ *= 0x100000001b3ULL;
    }
    // Field separator so ("ab","c") and ("a","bc") differ.
    h_ ^= 0xff;
    h_ *= 0x100000001b3ULL;
  }
  std::uint64_t value() const noexcept { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace

std::string fingerprint(const ChatRequest& request) {
  Fnv1a h;
  h.add(request.model_id);
  char temp[32];
  std::snprintf(temp, sizeof temp, "%.6f", request.temperature);
  h.add(temp);
  for (const auto& m : request.messages) {
    h.add(to_string(m.role));
    h.add(m.content);
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h.value()));
  return out;
}

std::int64_t estimate_tokens(std::string_view text) noexcept {
  std::int64_t n = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    const bool space = std::isspace(c) != 0;
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

std::int64_t estimate_tokens(const ChatRequest& request) noexcept {
  std::int64_t n = 0;
  for (const auto& m : request.messages) n += estimate_tokens(m.content);
  return n;
}

// ---------------------------------------------------------------------------

std::chrono::milliseconds RetryPolicy::delay_after(int attempt) const {
  double d = static_cast<double>(initial_delay.count());
  for (int i = 1; i < attempt; ++i) d *= multiplier;
  return std::chrono::milliseconds(static_cast<std::int64_t>(d));
}

bool RetryPolicy::is_retryable(const std::exception& e) const {
  return retryable ? retryable(e) : is_transient(e);
}

void RetryPolicy::wait(std::chrono::milliseconds d) const {
  if (sleep)
    sleep(d);
  else if (d.count() > 0)
    std::this_thread::sleep_for(d);
}

bool is_transient(const std::exception& e) noexcept {
  if (dynamic_cast<const Timeout*>(&e)) return true;
  if (const auto* pe = dynamic_cast<const ProviderError*>(&e)) {
    const int s = pe->status();
    return s == 0 || s == 408 || s == 429 || s >= 500;
  }
  return false;
}

// ---------------------------------------------------------------------------

RunLog::RunLog(const std::filesystem::path& path) : out_(path, std::ios::app | std::ios::binary) {
  if (!out_) throw Error("cannot open run log " + path.string());
}

void RunLog::append(Entry entry) {
  std::lock_guard lock(mu_);
  if (out_.is_open()) {
    out_ << to_json(entry).dump() << '\n';
    out_.flush();
  }
  entries_.push_back(std::move(entry));
}

std::vector<RunLog::Entry> RunLog::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

nlohmann::json RunLog::to_json(const Entry& e) {
  return nlohmann::json{{"tag", e.tag},
                        {"fingerprint", e.fingerprint},
                        {"model_id", e.model_id},
                        {"attempt", e.attempt},
                        {"outcome", e.outcome},
                        {"status", e.status},
                        {"latency_ms", e.latency_ms},
                        {"input_tokens", e.input_tokens},
                        {"output_tokens", e.output_tokens},
                        {"tokens_estimated", e.tokens_estimated},
                        {"error", e.error}};
}

RunLog::Entry RunLog::from_json(const nlohmann::json& j) {
  Entry e;
  e.tag = j.value("tag", "");
  e.fingerprint = j.value("fingerprint", "");
  e.model_id = j.value("model_id", "");
  e.attempt = j.value("attempt", 0);
  e.outcome = j.value("outcome", "");
  e.status = j.value("status", 0);
  e.latency_ms = j.value("latency_ms", 0.0);
  e.input_tokens = j.value("input_tokens", std::int64_t{0});
  e.output_tokens = j.value("output_tokens", std::int64_t{0});
  e.tokens_estimated = j.value("tokens_estimated", false);
  e.error = j.value("error", "");
  return e;
}

std::vector<RunLog::Entry> RunLog::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::vector<Entry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;  // torn final line after a crash
    out.push_back(from_json(j));
  }
  return out;
}

// ---------------------------------------------------------------------------

InFlightLimiter::InFlightLimiter(int limit) : limit_(limit) {
  if (limit < 1) throw ConfigError("in-flight limit must be >= 1");
}

void InFlightLimiter::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [this] { return active_ < limit_; });
  ++active_;
  peak_ = std::max(peak_, active_);
}

void InFlightLimiter::release() {
  {
    std::lock_guard lock(mu_);
    --active_;
  }
  cv_.notify_one();
}

int InFlightLimiter::peak() const {
  std::lock_guard lock(mu_);
  return peak_;
}

// ---------------------------------------------------------------------------

ChatResponse complete(ChatProvider& provider, const ChatRequest& request, const CallOptions& options) {
  validate(request);
  if (options.policy.max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
  const auto fp = fingerprint(request);

  for (int attempt = 1;; ++attempt) {
    RunLog::Entry entry{options.tag, fp, request.model_id, attempt, "", 0, 0.0, 0, 0, false, ""};
    const auto start = std::chrono::steady_clock::now();
    try {
      ChatResponse response;
      {
        InFlightLimiter::Guard guard(options.limiter);
        response = provider.send(request);
      }
      response.latency_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      response.attempts = attempt;
      if (options.log) {
        entry.outcome = "ok";
        entry.status = 200;
        entry.latency_ms = response.latency_ms;
        entry.input_tokens = response.input_tokens;
        entry.output_tokens = response.output_tokens;
        entry.tokens_estimated = response.tokens_estimated;
        options.log->append(std::move(entry));
      }
      return response;
    } catch (const ProviderError& e) {
      if (options.log) {
        entry.outcome = "error";
        entry.status = e.status();
        entry.latency_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        entry.error = e.what();
        options.log->append(std::move(entry));
      }
      if (attempt >= options.policy.max_attempts || !options.policy.is_retryable(e)) throw;
      options.policy.wait(options.policy.delay_after(attempt));
    }
  }
}

ChatResponse complete(ChatProvider& provider, const ChatRequest& request, const RetryPolicy& policy) {
  CallOptions options;
  options.policy = policy;
  return complete(provider, request, options);
}

// ---------------------------------------------------------------------------

Usd Usd::parse(std::string_view text) {
  auto fail = [&] { return Error("invalid decimal amount: '" + std::string(text) + "'"); };
  if (text.empty()) throw fail();
  bool neg = false;
  if (text.front() == '-') {
    neg = true;
    text.remove_prefix(1);
  }
  const auto dot = text.find('.');
  const auto whole = text.substr(0, dot);
  const auto frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() && frac.empty()) throw fail();
  if (frac.size() > 12) throw fail();
  std::int64_t picos = 0;
  for (char c : whole) {
    if (c < '0' || c > '9') throw fail();
    picos = picos * 10 + (c - '0');
    if (picos > 9'000'000) throw fail();
  }
  picos *= 1'000'000'000'000LL;
  std::int64_t scale = 100'000'000'000LL;
  for (char c : frac) {
    if (c < '0' || c > '9') throw fail();
    picos += (c - '0') * scale;
    scale /= 10;
  }
  return Usd(neg ? -picos : picos);
}

std::string Usd::str(int decimals) const {
  decimals = std::clamp(decimals, 0, 12);
  std::int64_t unit = 1;
  for (int i = decimals; i < 12; ++i) unit *= 10;
  const bool neg = picos_ < 0;
  const std::int64_t mag = neg ? -picos_ : picos_;
  const std::int64_t rounded = (mag + unit / 2) / unit;  // in units of 10^-decimals
  std::int64_t pow10 = 1;
  for (int i = 0; i < decimals; ++i) pow10 *= 10;
  std::string out = std::to_string(rounded / pow10);
  if (decimals > 0) {
    std::string frac = std::to_string(rounded % pow10);
    out += '.' + std::string(static_cast<std::size_t>(decimals) - frac.size(), '0') + frac;
  }
  return (neg && rounded != 0 ? "-" : "") + out;
}

void CostTable::set(const std::string& model_id, TokenRate rate) {
  if (rate.per_1m_input < Usd{} || rate.per_1m_output < Usd{}) throw ConfigError("negative rate for " + model_id);
  rates_[model_id] = rate;
}

const TokenRate& CostTable::at(const std::string& model_id) const {
  auto it = rates_.find(model_id);
  if (it == rates_.end()) throw UnknownModel(model_id);
  return it->second;
}

namespace {
Usd rate_from_json(const nlohmann::json& v, const std::string& what) {
  if (v.is_string()) return Usd::parse(v.get<std::string>());
  if (v.is_number()) {
    // Numbers go through their shortest decimal rendering so 0.27 stays 0.27.
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12f", v.get<double>());
    return Usd::parse(buf);
  }
  throw ConfigError("rate " + what + " must be a string or number");
}
}  // namespace

CostTable CostTable::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("models") || !j["models"].is_object())
    throw ConfigError("rate table needs a \"models\" object");
  CostTable t;
  for (const auto& [id, entry] : j["models"].items()) {
    if (!entry.contains("input_usd_per_1m") || !entry.contains("output_usd_per_1m"))
      throw ConfigError("rate entry " + id + " needs input_usd_per_1m and output_usd_per_1m");
    t.set(id, TokenRate{rate_from_json(entry["input_usd_per_1m"], id), rate_from_json(entry["output_usd_per_1m"], id)});
  }
  return t;
}

CostTable CostTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open rate table " + path.string());
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("rate table is not valid JSON: " + path.string());
  return from_json(j);
}

CostTable CostTable::july_2025() { return from_json(nlohmann::json::parse(detail::kRatesJson)); }

ModelCapabilities known_capabilities(const std::string& model_id) {
  static const auto rates = nlohmann::json::parse(detail::kRatesJson);
  ModelCapabilities caps;
  const auto& models = rates.at("models");
  if (auto it = models.find(model_id); it != models.end())
    caps.supports_temperature = it->value("supports_temperature", true);
  return caps;
}

Usd cost_of(const CostTable& table, const std::string& model_id, std::int64_t input_tokens,
            std::int64_t output_tokens) {
  if (input_tokens < 0 || output_tokens < 0) throw Error("token counts must be >= 0");
  const auto& rate = table.at(model_id);
  using i128 = __int128;
  const i128 scaled = static_cast<i128>(input_tokens) * rate.per_1m_input.picos() +
                      static_cast<i128>(output_tokens) * rate.per_1m_output.picos();
  const i128 picos = (scaled + 500'000) / 1'000'000;
  return Usd::from_picos(static_cast<std::int64_t>(picos));
}

}  // namespace judgebench
