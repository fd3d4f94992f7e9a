#include "judgebench/harness.hpp"

#include <algorithm>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "judgebench/errors.hpp"
#include "judgebench/generator.hpp"
#include "judgebench/parallel.hpp"
#include "judgebench/providers.hpp"
#include "judgebench/serialization.hpp"
#include "judgebench/strategies.hpp"

namespace judgebench {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kOpenAiEndpoint = "https://api.openai.com/v1/chat/completions";

std::string utc_now() {
  const auto t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double parse_double(std::string_view text, const char* what) {
  try {
    std::size_t used = 0;
    const std::string s(text);
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string("bad ") + what + " '" + std::string(text) + "'");
  }
}

template <class T>
T json_get(const nlohmann::json& j, const char* key, const char* context) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string(context) + "." + key + ": " + e.what());
  }
}

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<std::string_view> known, const char* context) {
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError(std::string("unknown key '") + key + "' in " + context);
}

}  // namespace

// ---------------------------------------------------------------------------
// Provider config

ProviderConfig ProviderConfig::parse(std::string_view text) {
  ProviderConfig p;
  const auto colon = text.find(':');
  const auto head = text.substr(0, colon);
  const auto rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (head == "oracle") {
    p.kind = "oracle";
    p.model_id = rest.empty() ? "oracle-mock" : std::string(rest);
  } else if (head == "noisy") {
    p.kind = "noisy";
    p.model_id = "noisy-mock";
    if (rest.empty()) throw ConfigError("noisy provider needs a flip probability, e.g. noisy:0.2");
    const auto c2 = rest.find(':');
    p.noise = parse_double(rest.substr(0, c2), "noise probability");
    if (c2 != std::string_view::npos) p.seed = static_cast<std::uint64_t>(parse_double(rest.substr(c2 + 1), "seed"));
  } else if (head == "openai") {
    if (rest.empty()) throw ConfigError("openai provider needs a model, e.g. openai:gpt-4o");
    p.kind = "http";
    p.model_id = std::string(rest);
    p.endpoint = std::string(kOpenAiEndpoint);
  } else if (head == "http") {
    const auto at = rest.find('@');
    if (at == std::string_view::npos || at == 0 || at + 1 == rest.size())
      throw ConfigError("http provider format is http:<model>@<url>");
    p.kind = "http";
    p.model_id = std::string(rest.substr(0, at));
    p.endpoint = std::string(rest.substr(at + 1));
  } else {
    throw ConfigError("unknown provider '" + std::string(text) + "' (oracle|noisy:<q>|openai:<model>|http:<model>@<url>)");
  }
  if (p.noise < 0.0 || p.noise > 1.0) throw ConfigError("noise probability must be in [0, 1]");
  return p;
}

ProviderConfig ProviderConfig::from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse(j.get<std::string>());
  if (!j.is_object()) throw ConfigError("provider must be a string or an object");
  reject_unknown_keys(j, {"kind", "model_id", "noise", "seed", "endpoint", "api_key_env", "timeout_s", "supports_temperature"},
                      "provider");
  ProviderConfig p;
  p.kind = j.value("kind", p.kind);
  if (p.kind != "oracle" && p.kind != "noisy" && p.kind != "http")
    throw ConfigError("provider kind must be oracle, noisy or http");
  p.model_id = j.value("model_id", p.kind == "oracle" ? "oracle-mock" : p.kind == "noisy" ? "noisy-mock" : "");
  p.noise = j.value("noise", 0.0);
  p.seed = j.value("seed", std::uint64_t{1});
  p.endpoint = j.value("endpoint", p.kind == "http" ? std::string(kOpenAiEndpoint) : std::string());
  p.api_key_env = j.value("api_key_env", p.api_key_env);
  p.timeout_s = j.value("timeout_s", p.timeout_s);
  if (j.contains("supports_temperature")) p.supports_temperature = json_get<bool>(j, "supports_temperature", "provider");
  if (p.model_id.empty()) throw ConfigError("provider model_id is empty");
  if (p.noise < 0.0 || p.noise > 1.0) throw ConfigError("noise probability must be in [0, 1]");
  return p;
}

nlohmann::ordered_json ProviderConfig::to_json() const {
  nlohmann::ordered_json j{{"kind", kind}, {"model_id", model_id}};
  if (kind == "noisy") {
    j["noise"] = noise;
    j["seed"] = seed;
  }
  if (kind == "http") {
    j["endpoint"] = endpoint;
    j["api_key_env"] = api_key_env;
    j["timeout_s"] = timeout_s;
    if (supports_temperature) j["supports_temperature"] = *supports_temperature;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Travel config

TravelConfig TravelConfig::from_json(const nlohmann::json& j) {
  reject_unknown_keys(j, {"kind", "speed_kmh", "endpoint", "profile", "token_env", "timeout_s", "fallback_on_error",
                          "fallback_speed_kmh"},
                      "travel");
  TravelConfig t;
  t.kind = j.value("kind", t.kind);
  t.speed_kmh = j.value("speed_kmh", t.speed_kmh);
  if (t.kind == "routing") {
    t.routing.endpoint = json_get<std::string>(j, "endpoint", "travel");
    t.routing.profile = j.value("profile", t.routing.profile);
    t.routing.token_env = j.value("token_env", t.routing.token_env);
    t.routing.timeout_s = j.value("timeout_s", t.routing.timeout_s);
    t.routing.fallback_on_error = j.value("fallback_on_error", t.routing.fallback_on_error);
    t.routing.fallback_speed_kmh = j.value("fallback_speed_kmh", t.routing.fallback_speed_kmh);
  } else if (t.kind != "haversine") {
    throw ConfigError("travel kind must be haversine or routing");
  }
  return t;
}

nlohmann::ordered_json TravelConfig::to_json() const {
  if (kind == "haversine") return {{"kind", kind}, {"speed_kmh", speed_kmh}};
  return {{"kind", kind},
          {"endpoint", routing.endpoint},
          {"profile", routing.profile},
          {"token_env", routing.token_env},
          {"timeout_s", routing.timeout_s},
          {"fallback_on_error", routing.fallback_on_error},
          {"fallback_speed_kmh", routing.fallback_speed_kmh}};
}

std::shared_ptr<TravelTimeEstimator> TravelConfig::make() const {
  if (kind == "routing") return std::make_shared<RoutingApiEstimator>(routing);
  return std::make_shared<HaversineEstimator>(speed_kmh);
}

// ---------------------------------------------------------------------------
// Run config

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  reject_unknown_keys(j, {"dataset", "strategy", "providers", "provider", "concurrency", "max_attempts",
                          "initial_delay_ms", "backoff_multiplier", "output_dir", "run_id", "resume", "skip_validate",
                          "max_pairs", "max_rounds", "rates", "shots", "personas", "travel"},
                      "run config");
  RunConfig c;
  try {
    if (j.contains("dataset")) c.dataset = j.at("dataset").get<std::string>();
    c.strategy = j.value("strategy", c.strategy);
    if (j.contains("provider")) c.providers.push_back(ProviderConfig::from_json(j.at("provider")));
    if (j.contains("providers"))
      for (const auto& p : j.at("providers")) c.providers.push_back(ProviderConfig::from_json(p));
    c.concurrency = j.value("concurrency", c.concurrency);
    c.max_attempts = j.value("max_attempts", c.max_attempts);
    c.initial_delay_ms = j.value("initial_delay_ms", c.initial_delay_ms);
    c.backoff_multiplier = j.value("backoff_multiplier", c.backoff_multiplier);
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    c.run_id = j.value("run_id", c.run_id);
    c.resume = j.value("resume", c.resume);
    c.skip_validate = j.value("skip_validate", c.skip_validate);
    if (j.contains("max_pairs") && !j.at("max_pairs").is_null()) c.max_pairs = j.at("max_pairs").get<std::size_t>();
    c.max_rounds = j.value("max_rounds", c.max_rounds);
    if (j.contains("rates")) c.rates = j.at("rates").get<std::string>();
    if (j.contains("shots")) c.shots = j.at("shots").get<std::string>();
    if (j.contains("personas")) c.personas = j.at("personas").get<std::string>();
    if (j.contains("travel")) c.travel = TravelConfig::from_json(j.at("travel"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("run config: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError(path.string() + " is not valid JSON");
  return from_json(j);
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["dataset"] = dataset.string();
  j["strategy"] = strategy;
  auto ps = nlohmann::ordered_json::array();
  for (const auto& p : providers) ps.push_back(p.to_json());
  j["providers"] = std::move(ps);
  j["concurrency"] = concurrency;
  j["max_attempts"] = max_attempts;
  j["initial_delay_ms"] = initial_delay_ms;
  j["backoff_multiplier"] = backoff_multiplier;
  j["output_dir"] = output_dir.string();
  j["run_id"] = run_id;
  j["resume"] = resume;
  j["skip_validate"] = skip_validate;
  j["max_pairs"] = max_pairs ? nlohmann::ordered_json(*max_pairs) : nlohmann::ordered_json(nullptr);
  j["max_rounds"] = max_rounds;
  j["rates"] = rates.string();
  j["shots"] = shots.string();
  j["personas"] = personas.string();
  j["travel"] = travel.to_json();
  return j;
}

void RunConfig::validate() const {
  if (dataset.empty()) throw ConfigError("no dataset given");
  if (!fs::exists(dataset)) throw ConfigError("dataset not found: " + dataset.string());
  const auto spec = StrategySpec::parse(strategy);
  if (spec.kind == StrategyKind::AR && providers.size() < 2)
    throw ConfigError("ar-cot5 needs at least two providers");
  if (concurrency < 1) throw ConfigError("concurrency must be >= 1");
  if (max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
  if (initial_delay_ms < 0 || backoff_multiplier < 1.0) throw ConfigError("bad backoff settings");
  if (max_rounds < 1) throw ConfigError("max_rounds must be >= 1");
  if (run_id.empty()) throw ConfigError("run_id is empty");
  if (run_id.find('/') != std::string::npos || run_id == "." || run_id == "..")
    throw ConfigError("run_id must be a plain directory name");
  for (const auto* p : {&rates, &shots, &personas})
    if (!p->empty() && !fs::exists(*p)) throw ConfigError("file not found: " + p->string());
}

RetryPolicy RunConfig::retry_policy() const {
  RetryPolicy p;
  p.max_attempts = max_attempts;
  p.initial_delay = std::chrono::milliseconds(initial_delay_ms);
  p.multiplier = backoff_multiplier;
  return p;
}

// ---------------------------------------------------------------------------
// Validation

nlohmann::ordered_json ValidationReport::to_json() const {
  auto issues = [](const std::vector<ValidationIssue>& v) {
    auto a = nlohmann::ordered_json::array();
    for (const auto& i : v) {
      auto violations = nlohmann::ordered_json::array();
      for (auto c : i.oracle.violations) violations.push_back(to_string(c));
      a.push_back({{"pair_id", i.pair_id},
                   {"expected", judgebench::to_json(i.expected)},
                   {"oracle_correct", i.oracle.correct},
                   {"oracle_violations", std::move(violations)},
                   {"detail", i.detail}});
    }
    return a;
  };
  return {{"pairs", pairs},
          {"disagreements", disagreements.size()},
          {"restore_failures", restore_failures.size()},
          {"ok", ok()},
          {"disagreeing_pairs", issues(disagreements)},
          {"restore_failing_pairs", issues(restore_failures)}};
}

ValidationReport validate_dataset(const std::vector<LabeledPair>& pairs, const TravelTimeEstimator& travel,
                                  int workers) {
  std::map<std::string, const LabeledPair*> positives;
  for (const auto& p : pairs)
    if (p.label.is_correct()) positives.emplace(p.user.id, &p);

  std::vector<std::optional<ValidationIssue>> disagreement(pairs.size()), restore(pairs.size());
  parallel_for(pairs.size(), workers, [&](std::size_t i) {
    const auto& p = pairs[i];
    const auto verdict = judge_pair(p.user, p.system, travel);
    const bool agrees = p.label.is_correct()
                            ? verdict.correct
                            : verdict.violations == std::set<ErrorCategory>{p.label.error()};
    if (!agrees) disagreement[i] = ValidationIssue{p.pair_id, p.label, verdict, explain_pair(p.user, p.system, travel)};
    if (p.label.is_correct()) return;
    const auto base = positives.find(p.user.id);
    if (base == positives.end()) {
      restore[i] = ValidationIssue{p.pair_id, p.label, verdict, "no positive pair for user " + p.user.id};
      return;
    }
    const auto restored = restore_dimension(p.system, base->second->system, p.label.error());
    const auto again = judge_pair(p.user, restored, travel);
    if (!again.correct) restore[i] = ValidationIssue{p.pair_id, p.label, again, explain_pair(p.user, restored, travel)};
  });

  ValidationReport report;
  report.pairs = pairs.size();
  for (auto& d : disagreement)
    if (d) report.disagreements.push_back(std::move(*d));
  for (auto& r : restore)
    if (r) report.restore_failures.push_back(std::move(*r));
  return report;
}

// ---------------------------------------------------------------------------
// Running

namespace {

nlohmann::ordered_json transcript_json(const std::vector<TranscriptEntry>& transcript) {
  auto a = nlohmann::ordered_json::array();
  for (const auto& e : transcript) {
    nlohmann::ordered_json v = nullptr;
    if (e.verdict) {
      v = {{"decision", e.verdict->decision}, {"explanation", e.verdict->explanation}};
      v["confidence"] = e.verdict->confidence ? nlohmann::ordered_json(*e.verdict->confidence) : nlohmann::ordered_json(nullptr);
    }
    a.push_back({{"round", e.round},
                 {"participant", e.participant},
                 {"model_id", e.model_id},
                 {"content", e.content},
                 {"verdict", std::move(v)},
                 {"input_tokens", e.usage.input_tokens},
                 {"output_tokens", e.usage.output_tokens},
                 {"latency_ms", e.usage.latency_ms},
                 {"cost_usd", e.usage.cost.str(12)},
                 {"note", e.note}});
  }
  return a;
}

EvaluationRecord make_record(const LabeledPair& pair, const StrategySpec& spec,
                             const std::vector<std::string>& model_ids, const JudgeOutcome& out) {
  EvaluationRecord r;
  r.pair_id = pair.pair_id;
  r.strategy = spec.name();
  r.model_ids = model_ids;
  r.decision = out.verdict.decision;
  r.explanation = out.verdict.explanation;
  r.confidence = out.verdict.confidence;
  r.label = pair.label;
  r.judge_failure = out.judge_failure;
  r.provider_exhausted = out.provider_exhausted;
  r.failure = out.failure;
  r.input_tokens = out.usage.input_tokens;
  r.output_tokens = out.usage.output_tokens;
  r.tokens_estimated = out.usage.tokens_estimated;
  r.latency_ms = out.wall_ms;
  r.call_latency_ms = out.usage.latency_ms;
  r.cost = out.usage.cost;
  r.calls = out.usage.calls;
  r.rounds_used = out.rounds_used;
  r.transcript = transcript_json(out.transcript);
  return r;
}

/// Loads the records written so far. A torn final line (interrupted write) is
/// cut off the file; corruption anywhere else is an error.
std::vector<EvaluationRecord> load_and_repair(const fs::path& path) {
  std::vector<EvaluationRecord> out;
  if (!fs::exists(path)) return out;
  std::string data;
  {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    data = ss.str();
  }
  std::size_t pos = 0, valid_end = 0;
  std::size_t line_no = 0;
  while (pos < data.size()) {
    const auto nl = data.find('\n', pos);
    const bool terminated = nl != std::string::npos;
    const auto line = data.substr(pos, terminated ? nl - pos : std::string::npos);
    ++line_no;
    const auto next = terminated ? nl + 1 : data.size();
    if (!line.empty()) {
      auto j = nlohmann::ordered_json::parse(line, nullptr, false);
      if (j.is_discarded() || !terminated) {
        if (next < data.size()) throw MalformedJson(path.string() + ":" + std::to_string(line_no) + ": not JSON");
        spdlog::warn("dropping torn final record line in {}", path.string());
        break;
      }
      out.push_back(record_from_json(j));
    }
    valid_end = next;
    pos = next;
  }
  if (valid_end < data.size()) fs::resize_file(path, valid_end);
  return out;
}

class RunWriter {
 public:
  RunWriter(const fs::path& dir, nlohmann::ordered_json manifest)
      : dir_(dir), manifest_(std::move(manifest)), records_(dir / "records.jsonl", std::ios::app) {
    if (!records_) throw Error("cannot open " + (dir / "records.jsonl").string());
  }

  void append(const EvaluationRecord& r) {
    std::lock_guard lock(mu_);
    records_ << to_json(r).dump() << '\n';
    records_.flush();
    if (!records_) throw Error("write to records.jsonl failed");
    manifest_["completed"][r.pair_id] = utc_now();
    write_manifest_locked();
  }

  void write_manifest() {
    std::lock_guard lock(mu_);
    write_manifest_locked();
  }

 private:
  void write_manifest_locked() {
    manifest_["updated_at"] = utc_now();
    const auto tmp = dir_ / "manifest.json.tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      out << manifest_.dump(2) << '\n';
      if (!out) throw Error("cannot write " + tmp.string());
    }
    fs::rename(tmp, dir_ / "manifest.json");
  }

  fs::path dir_;
  nlohmann::ordered_json manifest_;
  std::ofstream records_;
  std::mutex mu_;
};

std::vector<UserBlock> unique_users(const std::vector<LabeledPair>& pairs) {
  std::vector<UserBlock> users;
  std::set<std::string> seen;
  for (const auto& p : pairs)
    if (seen.insert(p.user.id).second) users.push_back(p.user);
  return users;
}

std::vector<std::shared_ptr<ChatProvider>> build_providers(const std::vector<ProviderConfig>& configs,
                                                           const std::vector<LabeledPair>& pairs,
                                                           std::shared_ptr<const TravelTimeEstimator> travel) {
  std::vector<std::shared_ptr<ChatProvider>> out;
  const auto users = unique_users(pairs);
  for (const auto& c : configs) {
    if (c.kind == "oracle") {
      out.push_back(std::make_shared<OracleMock>(users, travel, c.model_id));
    } else if (c.kind == "noisy") {
      out.push_back(std::make_shared<NoisyOracleMock>(users, travel, c.noise, c.seed, c.model_id));
    } else {
      HttpProviderConfig h;
      h.endpoint = c.endpoint;
      h.model_id = c.model_id;
      h.api_key_env = c.api_key_env;
      h.timeout_s = c.timeout_s;
      h.capabilities = known_capabilities(c.model_id);
      if (c.supports_temperature) h.capabilities.supports_temperature = *c.supports_temperature;
      out.push_back(std::make_shared<HttpChatProvider>(h));
    }
  }
  return out;
}

RunResult run_impl(const RunConfig& config, const std::vector<LabeledPair>& pairs,
                   const std::vector<std::shared_ptr<ChatProvider>>& providers,
                   const std::shared_ptr<TravelTimeEstimator>& travel, const std::set<std::string>& priced_models) {
  const auto spec = StrategySpec::parse(config.strategy);
  if (providers.empty()) throw ConfigError("no provider configured");
  if (spec.kind == StrategyKind::AR && providers.size() < 2) throw ConfigError("ar-cot5 needs at least two providers");

  // Pricing: real models must be priced; mocks cost nothing.
  CostTable costs = config.rates.empty() ? CostTable::july_2025() : CostTable::load(config.rates);
  for (const auto& p : providers)
    if (!costs.contains(p->model_id())) {
      if (priced_models.count(p->model_id()))
        throw ConfigError("no token rates for model '" + p->model_id() + "'; pass a rates file");
      costs.set(p->model_id(), TokenRate{});
    }

  if (!config.skip_validate) {
    const auto report = validate_dataset(pairs, *travel, config.concurrency);
    if (!report.ok())
      throw DatasetInvalid(std::to_string(report.disagreements.size()) + " oracle disagreements and " +
                           std::to_string(report.restore_failures.size()) + " restore failures in " +
                           config.dataset.string());
  }

  StrategyAssets assets;
  assets.shots = config.shots.empty() ? default_few_shots(*travel) : FewShotSet::load(config.shots);
  if (!config.personas.empty()) assets.personas = load_personas(config.personas);
  assets.max_rounds = config.max_rounds;

  const auto dir = config.run_dir();
  const auto records_path = dir / "records.jsonl";
  const auto manifest_path = dir / "manifest.json";
  fs::create_directories(dir);

  auto snapshot = config.to_json();
  snapshot.erase("resume");
  snapshot.erase("max_pairs");

  nlohmann::ordered_json manifest;
  std::vector<EvaluationRecord> existing;
  if (fs::exists(records_path) && fs::file_size(records_path) > 0 && !config.resume)
    throw ConfigError("run '" + config.run_id + "' already has records; pass --resume or choose another run id");
  if (config.resume && fs::exists(manifest_path)) {
    std::ifstream in(manifest_path);
    manifest = nlohmann::ordered_json::parse(in, nullptr, false);
    if (manifest.is_discarded()) throw Error("manifest.json is corrupt");
    const auto& old = manifest["config"];
    if (old.value("strategy", "") != snapshot["strategy"] || old["providers"] != snapshot["providers"])
      throw ConfigError("resume with a different strategy or provider set than run '" + config.run_id + "'");
  } else {
    manifest = {{"run_id", config.run_id},
                {"created_at", utc_now()},
                {"updated_at", utc_now()},
                {"dataset_pairs", pairs.size()},
                {"config", snapshot},
                {"completed", nlohmann::ordered_json::object()}};
  }
  if (config.resume) existing = load_and_repair(records_path);

  std::set<std::string> done;
  std::set<std::string> dataset_ids;
  for (const auto& p : pairs) dataset_ids.insert(p.pair_id);
  for (const auto& r : existing) {
    if (!dataset_ids.count(r.pair_id)) throw ConfigError("record for unknown pair '" + r.pair_id + "'");
    if (!done.insert(r.pair_id).second) throw Error("duplicate record for pair '" + r.pair_id + "'");
  }
  // Records are the source of truth; the manifest may lag one pair behind.
  auto completed = nlohmann::ordered_json::object();
  for (const auto& r : existing)
    completed[r.pair_id] = manifest["completed"].value(r.pair_id, std::string(manifest.value("updated_at", utc_now())));
  manifest["completed"] = std::move(completed);

  std::vector<const LabeledPair*> pending;
  for (const auto& p : pairs)
    if (!done.count(p.pair_id)) pending.push_back(&p);
  if (config.max_pairs && pending.size() > *config.max_pairs) pending.resize(*config.max_pairs);

  RunResult result;
  result.run_dir = dir;
  result.dataset_pairs = pairs.size();
  result.skipped = existing.size();

  std::vector<ChatProvider*> handles;
  std::vector<std::string> model_ids;
  for (const auto& p : providers) handles.push_back(p.get());
  if (spec.kind != StrategyKind::AR) handles.resize(1);
  for (auto* h : handles) model_ids.push_back(h->model_id());

  std::vector<EvaluationRecord> fresh(pending.size());
  if (!pending.empty() || !fs::exists(manifest_path)) {
    RunWriter writer(dir, manifest);
    writer.write_manifest();
    RunLog log(dir / "runlog.jsonl");
    InFlightLimiter limiter(config.concurrency);
    const auto policy = config.retry_policy();
    std::mutex progress_mu;
    std::size_t finished = 0;

    parallel_for(pending.size(), config.concurrency, [&](std::size_t i) {
      const auto& pair = *pending[i];
      JudgeContext ctx;
      ctx.call.policy = policy;
      ctx.call.log = &log;
      ctx.call.limiter = &limiter;
      ctx.call.tag = pair.pair_id;
      ctx.costs = &costs;
      const auto outcome = run_strategy(spec, pair.user, pair.system, handles, assets, ctx);
      fresh[i] = make_record(pair, spec, model_ids, outcome);
      writer.append(fresh[i]);
      std::lock_guard lock(progress_mu);
      if (++finished % 100 == 0) spdlog::info("{}: {} of {} pending pairs judged", config.run_id, finished, pending.size());
    });
  }

  result.judged_now = fresh.size();
  for (const auto& r : fresh)
    if (r.provider_exhausted) result.provider_failures.push_back(r.pair_id + ": " + r.failure);

  std::vector<EvaluationRecord> all = std::move(existing);
  for (auto& r : fresh) all.push_back(std::move(r));
  result.total_records = all.size();
  result.complete = all.size() == pairs.size();
  if (result.complete) {
    result.summary = summarize(all);
    const auto text = to_json(*result.summary).dump(2) + "\n";
    const auto summary_path = dir / "summary.json";
    bool unchanged = false;
    if (fs::exists(summary_path)) {
      std::ifstream in(summary_path);
      std::ostringstream ss;
      ss << in.rdbuf();
      unchanged = ss.str() == text;
    }
    if (!unchanged) {
      std::ofstream out(dir / "summary.json.tmp", std::ios::trunc);
      out << text;
      out.close();
      fs::rename(dir / "summary.json.tmp", summary_path);
    }
  }
  return result;
}

}  // namespace

RunResult run_benchmark(const RunConfig& config) {
  config.validate();
  if (config.providers.empty()) throw ConfigError("no provider configured");
  const auto pairs = read_dataset(config.dataset);
  auto travel = config.travel.make();
  const auto providers = build_providers(config.providers, pairs, travel);
  std::set<std::string> priced;
  for (const auto& p : config.providers)
    if (!p.is_mock()) priced.insert(p.model_id);
  return run_impl(config, pairs, providers, travel, priced);
}

RunResult run_benchmark(const RunConfig& config, const std::vector<std::shared_ptr<ChatProvider>>& providers) {
  auto c = config;
  if (c.providers.empty())
    for (const auto& p : providers) {
      ProviderConfig pc;
      pc.kind = "injected";
      pc.model_id = p->model_id();
      c.providers.push_back(pc);
    }
  c.validate();
  const auto pairs = read_dataset(c.dataset);
  return run_impl(c, pairs, providers, c.travel.make(), {});
}

Summary report_run(const fs::path& run_dir) {
  const auto path = run_dir / "records.jsonl";
  if (!fs::exists(path)) throw Error("no records.jsonl in " + run_dir.string());
  return summarize(read_records(path));
}

void configure_logging(bool quiet) {
  static std::once_flag once;
  std::call_once(once, [] { spdlog::set_default_logger(spdlog::stderr_color_mt("judgebench")); });
  spdlog::set_level(quiet ? spdlog::level::warn : spdlog::level::info);
}

}  // namespace judgebench
