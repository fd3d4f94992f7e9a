#include "judgebench/strategies.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <map>
#include <memory>
#include <set>

#include "judgebench/errors.hpp"
#include "judgebench/serialization.hpp"

namespace judgebench {

// ---------------------------------------------------------------------------
// Spec

StrategySpec StrategySpec::parse(std::string_view name) {
  if (name == "io") return {StrategyKind::IO, 0, 1, std::nullopt};
  if (name == "cot1") return {StrategyKind::CoT, 1, 1, std::nullopt};
  if (name == "cot3") return {StrategyKind::CoT, 3, 1, std::nullopt};
  if (name == "cot5") return {StrategyKind::CoT, 5, 1, std::nullopt};
  if (name == "sc3") return {StrategyKind::SC, kSelfConsistencyShots, 3, std::nullopt};
  if (name == "sc5") return {StrategyKind::SC, kSelfConsistencyShots, 5, std::nullopt};
  if (name == "mab") return {StrategyKind::MAB, 0, 1, std::nullopt};
  if (name == "mad") return {StrategyKind::MAD, 0, 1, std::nullopt};
  if (name == "ar-cot5") return {StrategyKind::AR, 5, 1, std::nullopt};
  throw ConfigError("unknown strategy '" + std::string(name) + "' (io|cot1|cot3|cot5|sc3|sc5|mab|mad|ar-cot5)");
}

std::vector<StrategySpec> StrategySpec::all() {
  std::vector<StrategySpec> out;
  for (auto n : {"io", "cot1", "cot3", "cot5", "sc3", "sc5", "mab", "mad", "ar-cot5"}) out.push_back(parse(n));
  return out;
}

std::string StrategySpec::name() const {
  switch (kind) {
    case StrategyKind::IO: return "io";
    case StrategyKind::CoT: return "cot" + std::to_string(shots);
    case StrategyKind::SC: return "sc" + std::to_string(samples);
    case StrategyKind::MAB: return "mab";
    case StrategyKind::MAD: return "mad";
    case StrategyKind::AR: return "ar-cot" + std::to_string(shots);
  }
  return "?";
}

double StrategySpec::effective_temperature() const {
  if (temperature) return *temperature;
  return kind == StrategyKind::SC ? kSelfConsistencyTemperature : 0.0;
}

void DebateConfig::validate(std::size_t participants) const {
  if (max_rounds < 1) throw ConfigError("max_rounds must be >= 1");
  if (participants < 2) throw ConfigError("a panel needs at least two participants");
}

// ---------------------------------------------------------------------------
// Aggregation

double CalibrationTable::operator()(double p) const noexcept {
  if (p == 1.0) return 1.0;
  if (p >= 0.9 && p < 1.0) return 0.8;
  if (p >= 0.8 && p < 0.9) return 0.5;
  if (p >= 0.6 && p < 0.8) return 0.3;
  return 0.1;
}

bool aggregate_mode(std::span<const bool> verdicts) {
  if (verdicts.empty()) throw Error("aggregate_mode needs at least one verdict");
  const auto yes = std::count(verdicts.begin(), verdicts.end(), true);
  const auto no = static_cast<std::ptrdiff_t>(verdicts.size()) - yes;
  return yes > no;
}

bool confidence_weighted_vote(std::span<const WeightedVote> votes, const CalibrationTable& f) {
  if (votes.empty()) throw Error("confidence_weighted_vote needs at least one vote");
  double yes = 0.0, no = 0.0;
  for (const auto& v : votes) (v.decision ? yes : no) += f(v.confidence.value_or(0.0));
  return yes > no;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string hours_text(const std::vector<OpenInterval>& day) {
  if (day.empty()) return "closed";
  std::string out;
  for (const auto& iv : day) {
    if (!out.empty()) out += ", ";
    out += format_clock(iv.open) + "-" + format_clock(iv.close);
  }
  return out;
}

std::vector<OpenInterval> parse_hours_text(const std::string& text) {
  std::vector<OpenInterval> out;
  if (text == "closed") return out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find(", ", pos);
    const auto part = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    const auto dash = part.find('-');
    auto open = dash == std::string::npos ? std::nullopt : parse_clock(part.substr(0, dash));
    auto close = dash == std::string::npos ? std::nullopt : parse_clock(part.substr(dash + 1));
    if (!open || !close) throw SchemaViolation("opening_hours", "bad interval '" + part + "'");
    out.push_back({*open, *close});
    if (end == std::string::npos) break;
    pos = end + 2;
  }
  return out;
}

nlohmann::ordered_json render_location(const GeoPoint& p) {
  return {{"district", p.district_label}, {"lat", p.lat}, {"lon", p.lon}};
}

std::string output_format(bool confidence) {
  std::string fmt = R"({"decision": true or false, "explanation": "<your reasoning>")";
  if (confidence) fmt += R"(, "confidence": <number between 0 and 1>)";
  return fmt + "}";
}

std::string render_example(std::size_t n, const WorkedExample& ex, bool confidence) {
  std::string out = "Example " + std::to_string(n) + "\n";
  out += "Example user block: " + render_user_block(ex.user).dump() + "\n";
  out += "Example recommendation: " + render_system_block(ex.system).dump() + "\n";
  out += "Reasoning:\n";
  for (const auto& step : ex.reasoning) out += "- " + step + "\n";
  nlohmann::ordered_json answer{{"decision", ex.decision},
                                {"explanation", ex.decision ? "All parameters are correct."
                                                            : "At least one parameter is incorrect."}};
  if (confidence) answer["confidence"] = 1.0;
  out += "Answer: " + answer.dump() + "\n";
  return out;
}

}  // namespace

nlohmann::ordered_json render_user_block(const UserBlock& user) {
  return {{"utterance", user.utterance},
          {"location", render_location(user.location)},
          {"date", user.date.iso()},
          {"weekday", weekday_name(user.date.weekday())},
          {"time", format_clock(user.time)}};
}

nlohmann::ordered_json render_system_block(const SystemBlock& system) {
  nlohmann::ordered_json hours;
  for (auto d : kWeekdays) hours[std::string(weekday_name(d))] = hours_text(system.opening_hours.on(d));
  return {{"venue_name", system.venue_name}, {"location", render_location(system.location)},
          {"cuisine", system.cuisine},       {"cost", to_string(system.cost)},
          {"rating", system.rating},         {"opening_hours", std::move(hours)}};
}

SystemBlock parse_rendered_system_block(const nlohmann::json& j) {
  try {
    SystemBlock s;
    s.venue_name = j.at("venue_name").get<std::string>();
    const auto& loc = j.at("location");
    s.location = GeoPoint{loc.at("lat").get<double>(), loc.at("lon").get<double>(), loc.at("district").get<std::string>()};
    s.cuisine = j.at("cuisine").get<std::string>();
    auto cost = cost_from_string(j.at("cost").get<std::string>());
    if (!cost) throw SchemaViolation("cost", "expected low|medium|high");
    s.cost = *cost;
    s.rating = j.at("rating").get<double>();
    for (auto d : kWeekdays)
      s.opening_hours.on(d) = parse_hours_text(j.at("opening_hours").at(std::string(weekday_name(d))).get<std::string>());
    validate(s);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaViolation("recommendation", e.what());
  }
}

std::string_view judging_rules() {
  return "1. Location: the venue must be at most a 15-minute drive from the user's location.\n"
         "2. Time: the venue must be open on the requested weekday at the requested time.\n"
         "3. Cost: the venue's cost level must match the price level the user asked for.\n"
         "4. Rating: the venue's rating must satisfy the user's rating request. When the user asks for a rating "
         "around a value, the rating is incorrect if it differs from that value by more than 0.2.\n"
         "5. Cuisine: the venue must serve the cuisine the user asked for.";
}

ChatRequest render_prompt(const StrategySpec& spec, const UserBlock& user, const SystemBlock& system,
                          const Persona* persona, const FewShotSet* shots) {
  const bool uses_shots = spec.kind == StrategyKind::CoT || spec.kind == StrategyKind::SC || spec.kind == StrategyKind::AR;
  if (uses_shots && spec.shots > 0) {
    if (!shots) throw MissingAttachment(spec.name() + " needs worked examples");
    if (shots->examples.size() != static_cast<std::size_t>(spec.shots))
      throw MissingAttachment(spec.name() + " needs exactly " + std::to_string(spec.shots) + " worked examples, got " +
                              std::to_string(shots->examples.size()));
  }
  if ((spec.kind == StrategyKind::MAB || spec.kind == StrategyKind::MAD) && !persona)
    throw MissingAttachment(spec.name() + " needs a persona");

  const bool confidence = spec.asks_confidence();
  std::string prompt =
      "You are a critical evaluator. Decide whether the recommendation of an in-car navigation assistant "
      "(Recommendation) fits what the user asked for in their utterance and context (User Block).\n\n";
  if (uses_shots && spec.shots > 0) {
    prompt += "Worked examples:\n\n";
    for (std::size_t i = 0; i < shots->examples.size(); ++i)
      prompt += render_example(i + 1, shots->examples[i], confidence) + "\n";
    prompt += "Now evaluate the following case. Reason step by step through every rule, as in the examples, "
              "and put that reasoning in the explanation.\n\n";
  }
  prompt += std::string(kUserBlockPrefix) + render_user_block(user).dump() + "\n\n";
  prompt += std::string(kRecommendationPrefix) + render_system_block(system).dump() + "\n\n";
  prompt += "Rules:\n" + std::string(judging_rules()) + "\n\n";
  prompt += "Decision: If any of the parameters above is INCORRECT, the final decision is false. If all parameters "
            "are CORRECT, the final decision is true.\n\n";
  if (confidence)
    prompt += "Also state how confident you are that your decision is right, as a number between 0 and 1 in the "
              "\"confidence\" field.\n\n";
  prompt += "Respond strictly in the following format:\n" + output_format(confidence) + "\n\n";
  prompt += "The output must always be valid JSON.";

  ChatRequest req;
  req.temperature = spec.effective_temperature();
  if (persona) req.messages.push_back({Role::System, persona->system_prompt});
  req.messages.push_back({Role::User, std::move(prompt)});
  return req;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

/// End index (inclusive) of the JSON object starting at `open`, honouring strings.
std::optional<std::size_t> object_end(std::string_view s, std::size_t open) {
  int depth = 0;
  bool in_string = false, escaped = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (escaped) escaped = false;
      else if (c == '\\') escaped = true;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return i;
  }
  return std::nullopt;
}

std::string trim_lower(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

Verdict parse_verdict(std::string_view content) {
  bool saw_object = false;
  for (auto open = content.find('{'); open != std::string_view::npos; open = content.find('{', open + 1)) {
    const auto end = object_end(content, open);
    if (!end) continue;
    const auto j = nlohmann::json::parse(content.substr(open, *end - open + 1), nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;
    saw_object = true;
    auto it = j.find("decision");
    if (it == j.end()) continue;

    Verdict v;
    if (it->is_boolean()) {
      v.decision = it->get<bool>();
    } else if (it->is_string()) {
      const auto s = trim_lower(it->get<std::string>());
      if (s != "true" && s != "false") throw ParseError("decision must be true or false, got '" + s + "'");
      v.decision = s == "true";
    } else {
      throw ParseError("decision must be a boolean");
    }
    if (auto e = j.find("explanation"); e != j.end()) v.explanation = e->is_string() ? e->get<std::string>() : e->dump();
    if (auto c = j.find("confidence"); c != j.end()) {
      std::optional<double> p;
      if (c->is_number()) p = c->get<double>();
      else if (c->is_string()) {
        try {
          p = std::stod(c->get<std::string>());
        } catch (const std::exception&) {
        }
      }
      if (p && *p >= 0.0 && *p <= 1.0) v.confidence = p;
    }
    return v;
  }
  throw ParseError(saw_object ? "JSON object has no decision field" : "no JSON object in judge output");
}

// ---------------------------------------------------------------------------
// Running

Usage& Usage::operator+=(const Usage& o) {
  input_tokens += o.input_tokens;
  output_tokens += o.output_tokens;
  latency_ms += o.latency_ms;
  cost += o.cost;
  calls += o.calls;
  tokens_estimated = tokens_estimated || o.tokens_estimated;
  return *this;
}

namespace {

using Clock = std::chrono::steady_clock;

/// A call that could not produce a verdict within the retry budget.
struct CallFailed {
  bool provider_exhausted = false;
  std::string message;
};

struct CallResult {
  Verdict verdict;
  std::string content;
  std::vector<TranscriptEntry> entries;
};

/// One judged call: provider retries happen inside complete(); unparseable
/// answers are re-asked up to the policy's attempt budget. Every answered
/// call lands in the transcript, including unparseable ones.
CallResult judged_call(ChatProvider& provider, ChatRequest request, const JudgeContext& ctx, int round,
                       const std::string& participant, std::vector<TranscriptEntry>& sink) {
  request.model_id = provider.model_id();
  const int budget = std::max(1, ctx.call.policy.max_attempts);
  for (int attempt = 1;; ++attempt) {
    ChatResponse response;
    try {
      response = complete(provider, request, ctx.call);
    } catch (const ProviderError& e) {
      throw CallFailed{true, participant + ": " + e.what()};
    }
    TranscriptEntry entry;
    entry.round = round;
    entry.participant = participant;
    entry.model_id = request.model_id;
    entry.content = response.content;
    entry.usage = Usage{response.input_tokens, response.output_tokens, response.latency_ms,
                        ctx.costs ? cost_of(*ctx.costs, request.model_id, response.input_tokens, response.output_tokens)
                                  : Usd{},
                        1, response.tokens_estimated};
    try {
      auto verdict = parse_verdict(response.content);
      entry.verdict = verdict;
      sink.push_back(std::move(entry));
      return CallResult{std::move(verdict), response.content, {}};
    } catch (const ParseError& e) {
      entry.note = std::string("parse error: ") + e.what() + (attempt < budget ? "; retrying" : "; giving up");
      sink.push_back(std::move(entry));
      if (ctx.call.log)
        ctx.call.log->append(RunLog::Entry{ctx.call.tag, fingerprint(request), request.model_id, attempt,
                                           "parse_error", 200, 0.0, 0, 0, false, e.what()});
      if (attempt >= budget) throw CallFailed{false, participant + ": " + e.what()};
    }
  }
}

struct Seat {
  ChatProvider* provider;
  std::string name;
  std::vector<ChatMessage> history;
  double temperature = 0.0;
};

/// Runs one call per seat; results and transcript entries come back in seat
/// order regardless of completion order. Seats sending the very same request
/// (self-consistency samples) run one after another so that a provider keyed
/// on repeated requests sees them in seat order.
std::vector<CallResult> fan_out(std::vector<Seat>& seats, const JudgeContext& ctx, int round, bool concurrent) {
  std::vector<std::future<std::pair<CallResult, std::vector<TranscriptEntry>>>> futures;
  futures.reserve(seats.size());
  for (auto& seat : seats) {
    futures.push_back(std::async(concurrent ? std::launch::async : std::launch::deferred, [&seat, &ctx, round] {
      std::vector<TranscriptEntry> entries;
      ChatRequest req;
      req.messages = seat.history;
      req.temperature = seat.temperature;
      try {
        auto r = judged_call(*seat.provider, std::move(req), ctx, round, seat.name, entries);
        return std::make_pair(std::move(r), std::move(entries));
      } catch (CallFailed& f) {
        CallResult failed;
        failed.entries = std::move(entries);
        throw std::make_pair(std::move(f), std::move(failed));
      }
    }));
  }
  std::vector<CallResult> results;
  std::optional<CallFailed> failure;
  std::vector<TranscriptEntry> failed_entries;
  std::exception_ptr other;
  for (auto& fut : futures) {
    try {
      auto [r, entries] = fut.get();
      r.entries = std::move(entries);
      results.push_back(std::move(r));
    } catch (std::pair<CallFailed, CallResult>& f) {
      if (!failure) failure = f.first;
      results.push_back(std::move(f.second));
    } catch (...) {
      if (!other) other = std::current_exception();
    }
  }
  if (other) std::rethrow_exception(other);
  if (failure) {
    std::vector<TranscriptEntry> all;
    for (auto& r : results)
      for (auto& e : r.entries) all.push_back(std::move(e));
    throw std::make_pair(std::move(*failure), std::move(all));
  }
  return results;
}

void absorb(JudgeOutcome& out, std::vector<TranscriptEntry>&& entries) {
  for (auto& e : entries) {
    out.usage += e.usage;
    out.transcript.push_back(std::move(e));
  }
}

void absorb(JudgeOutcome& out, std::vector<CallResult>& results) {
  for (auto& r : results) absorb(out, std::move(r.entries));
}

template <class Body>
JudgeOutcome guarded(Body&& body) {
  JudgeOutcome out;
  const auto start = Clock::now();
  try {
    body(out);
  } catch (std::pair<CallFailed, std::vector<TranscriptEntry>>& f) {
    absorb(out, std::move(f.second));
    out.judge_failure = true;
    out.provider_exhausted = f.first.provider_exhausted;
    out.failure = f.first.message;
    out.verdict = Verdict{false, "judge failure: " + f.first.message, std::nullopt};
  }
  out.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  return out;
}

std::vector<CallResult> run_round(std::vector<Seat>& seats, const JudgeContext& ctx, int round,
                                  bool concurrent = true) {
  return fan_out(seats, ctx, round, concurrent);
}

bool all_equal(const std::vector<CallResult>& rs) {
  return std::all_of(rs.begin(), rs.end(), [&](const CallResult& r) { return r.verdict.decision == rs.front().verdict.decision; });
}

bool mode_of(const std::vector<CallResult>& rs) {
  const auto votes = std::make_unique<bool[]>(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) votes[i] = rs[i].verdict.decision;
  return aggregate_mode(std::span<const bool>(votes.get(), rs.size()));
}

/// Explanation of the first participant that voted for `decision`.
std::string explanation_for(const std::vector<CallResult>& rs, bool decision) {
  for (const auto& r : rs)
    if (r.verdict.decision == decision) return r.verdict.explanation;
  return {};
}

std::vector<Seat> single_prompt_seats(ChatProvider& provider, const ChatRequest& req, std::size_t n,
                                      const std::string& name) {
  std::vector<Seat> seats;
  for (std::size_t i = 0; i < n; ++i)
    seats.push_back(Seat{&provider, n == 1 ? name : name + "#" + std::to_string(i + 1), req.messages, req.temperature});
  return seats;
}

std::string discussion_message(int next_round, const std::vector<Seat>& seats, const std::vector<CallResult>& last,
                               std::size_t self) {
  std::string msg = "Round " + std::to_string(next_round) +
                    ". The other panel members answered as follows in the previous round:\n";
  for (std::size_t k = 0; k < seats.size(); ++k)
    if (k != self) msg += "- " + seats[k].name + ": " + last[k].content + "\n";
  msg += "Your own previous answer is above. Re-examine every rule, weigh the other answers, and respond again "
         "strictly in the same JSON format.";
  return msg;
}

/// Shared loop of MAD and AR: round 1 is independent; while verdicts differ
/// and rounds remain, every seat sees its own and all other previous answers.
std::vector<CallResult> debate(std::vector<Seat>& seats, int max_rounds, const JudgeContext& ctx, JudgeOutcome& out,
                               bool& consensus) {
  std::vector<CallResult> last;
  for (int round = 1; round <= max_rounds; ++round) {
    if (round > 1) {
      for (std::size_t i = 0; i < seats.size(); ++i) {
        seats[i].history.push_back({Role::Assistant, last[i].content});
        seats[i].history.push_back({Role::User, discussion_message(round, seats, last, i)});
      }
    }
    last = run_round(seats, ctx, round);
    absorb(out, last);
    out.rounds_used = round;
    if (all_equal(last)) {
      consensus = true;
      return last;
    }
  }
  consensus = false;
  return last;
}

}  // namespace

JudgeOutcome run_io(const StrategySpec& spec, const UserBlock& user, const SystemBlock& system,
                    ChatProvider& provider, const JudgeContext& ctx) {
  if (spec.kind != StrategyKind::IO) throw ConfigError("run_io called with " + spec.name());
  const auto req = render_prompt(spec, user, system);
  return guarded([&](JudgeOutcome& out) {
    auto seats = single_prompt_seats(provider, req, 1, provider.model_id());
    auto rs = run_round(seats, ctx, 1);
    absorb(out, rs);
    out.verdict = rs.front().verdict;
    out.rounds_used = 1;
  });
}

JudgeOutcome run_cot(const StrategySpec& spec, const UserBlock& user, const SystemBlock& system,
                     ChatProvider& provider, const FewShotSet& shots, const JudgeContext& ctx) {
  if (spec.kind != StrategyKind::CoT) throw ConfigError("run_cot called with " + spec.name());
  const auto examples = shots.take(static_cast<std::size_t>(spec.shots));
  const auto req = render_prompt(spec, user, system, nullptr, &examples);
  return guarded([&](JudgeOutcome& out) {
    auto seats = single_prompt_seats(provider, req, 1, provider.model_id());
    auto rs = run_round(seats, ctx, 1);
    absorb(out, rs);
    out.verdict = rs.front().verdict;
    out.rounds_used = 1;
  });
}

JudgeOutcome run_sc(const StrategySpec& spec, const UserBlock& user, const SystemBlock& system,
                    ChatProvider& provider, const FewShotSet& shots, const JudgeContext& ctx) {
  if (spec.kind != StrategyKind::SC) throw ConfigError("run_sc called with " + spec.name());
  if (spec.samples < 1) throw ConfigError("self-consistency needs at least one sample");
  const auto examples = shots.take(static_cast<std::size_t>(spec.shots));
  const auto req = render_prompt(spec, user, system, nullptr, &examples);
  return guarded([&](JudgeOutcome& out) {
    auto seats = single_prompt_seats(provider, req, static_cast<std::size_t>(spec.samples), provider.model_id());
    auto rs = run_round(seats, ctx, 1, false);
    absorb(out, rs);
    const bool decision = mode_of(rs);
    out.verdict = Verdict{decision, explanation_for(rs, decision), std::nullopt};
    out.rounds_used = 1;
  });
}

namespace {
std::vector<Seat> persona_seats(const DebateConfig& config, ChatProvider& provider, const UserBlock& user,
                                const SystemBlock& system, StrategyKind kind) {
  std::vector<Seat> seats;
  const StrategySpec spec{kind, 0, 1, std::nullopt};
  for (const auto& persona : config.panel) {
    auto req = render_prompt(spec, user, system, &persona);
    seats.push_back(Seat{&provider, persona.name, std::move(req.messages), req.temperature});
  }
  return seats;
}
}  // namespace

JudgeOutcome run_mab(const DebateConfig& config, const UserBlock& user, const SystemBlock& system,
                     ChatProvider& provider, const JudgeContext& ctx) {
  config.validate(config.panel.size());
  auto seats = persona_seats(config, provider, user, system, StrategyKind::MAB);
  return guarded([&](JudgeOutcome& out) {
    auto rs = run_round(seats, ctx, 1);
    absorb(out, rs);
    const bool decision = mode_of(rs);
    out.verdict = Verdict{decision, explanation_for(rs, decision), std::nullopt};
    out.rounds_used = 1;
  });
}

JudgeOutcome run_mad(const DebateConfig& config, const UserBlock& user, const SystemBlock& system,
                     ChatProvider& provider, const JudgeContext& ctx) {
  config.validate(config.panel.size());
  auto seats = persona_seats(config, provider, user, system, StrategyKind::MAD);
  return guarded([&](JudgeOutcome& out) {
    bool consensus = false;
    auto last = debate(seats, config.max_rounds, ctx, out, consensus);
    const bool decision = consensus ? last.front().verdict.decision : mode_of(last);
    out.verdict = Verdict{decision, explanation_for(last, decision), std::nullopt};
  });
}

JudgeOutcome run_roundtable(std::span<ChatProvider* const> providers, const UserBlock& user,
                            const SystemBlock& system, const FewShotSet& shots, const DebateConfig& config,
                            const JudgeContext& ctx) {
  config.validate(providers.size());
  std::set<const ChatProvider*> distinct;
  for (auto* p : providers) {
    if (!p) throw ConfigError("null provider in roundtable");
    if (!distinct.insert(p).second) throw ConfigError("roundtable providers must be distinct handles");
  }
  const StrategySpec spec = StrategySpec::parse("ar-cot5");
  const auto examples = shots.take(static_cast<std::size_t>(spec.shots));
  const auto req = render_prompt(spec, user, system, nullptr, &examples);

  std::vector<Seat> seats;
  std::map<std::string, int> name_uses;
  for (auto* p : providers) {
    auto name = p->model_id();
    if (const int n = name_uses[name]++; n > 0) name += "#" + std::to_string(n + 1);
    seats.push_back(Seat{p, std::move(name), req.messages, req.temperature});
  }

  return guarded([&](JudgeOutcome& out) {
    bool consensus = false;
    auto last = debate(seats, config.max_rounds, ctx, out, consensus);
    std::vector<WeightedVote> votes;
    const auto final_round = out.rounds_used;
    for (std::size_t i = 0; i < last.size(); ++i) {
      votes.push_back({last[i].verdict.decision, last[i].verdict.confidence});
      if (!last[i].verdict.confidence) {
        // Flag on the participant's final-round entry.
        for (auto it = out.transcript.rbegin(); it != out.transcript.rend(); ++it)
          if (it->participant == seats[i].name && it->round == final_round && it->verdict) {
            it->note += (it->note.empty() ? "" : "; ") + std::string("missing confidence, weighted as p = 0");
            break;
          }
      }
    }
    const CalibrationTable f;
    double yes = 0.0, total = 0.0;
    for (const auto& v : votes) {
      const double w = f(v.confidence.value_or(0.0));
      total += w;
      if (v.decision) yes += w;
    }
    const bool decision = consensus ? last.front().verdict.decision : confidence_weighted_vote(votes, f);
    const double share = total > 0.0 ? (decision ? yes : total - yes) / total : 0.0;
    out.verdict = Verdict{decision, explanation_for(last, decision), share};
  });
}

JudgeOutcome run_strategy(const StrategySpec& spec, const UserBlock& user, const SystemBlock& system,
                          std::span<ChatProvider* const> providers, const StrategyAssets& assets,
                          const JudgeContext& ctx) {
  if (providers.empty() || !providers.front()) throw ConfigError("no provider configured");
  auto& first = *providers.front();
  switch (spec.kind) {
    case StrategyKind::IO: return run_io(spec, user, system, first, ctx);
    case StrategyKind::CoT: return run_cot(spec, user, system, first, assets.shots, ctx);
    case StrategyKind::SC: return run_sc(spec, user, system, first, assets.shots, ctx);
    case StrategyKind::MAB: return run_mab(DebateConfig{1, assets.personas}, user, system, first, ctx);
    case StrategyKind::MAD: return run_mad(DebateConfig{assets.max_rounds, assets.personas}, user, system, first, ctx);
    case StrategyKind::AR:
      return run_roundtable(providers, user, system, assets.shots, DebateConfig{assets.max_rounds, {}}, ctx);
  }
  throw ConfigError("unhandled strategy");
}

}  // namespace judgebench
