#pragma once

// Judging protocols: single-call I/O and chain-of-thought, self-consistency,
// a one-round persona panel (MAB), a multi-round persona debate (MAD) and a
// cross-model roundtable with confidence-weighted voting (AR).

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "judgebench/domain.hpp"
#include "judgebench/provider.hpp"
#include "judgebench/travel_time.hpp"

namespace judgebench {

enum class StrategyKind { IO, CoT, SC, MAB, MAD, AR };

/// One of: io, cot1, cot3, cot5, sc3, sc5, mab, mad, ar-cot5.
struct StrategySpec {
  StrategyKind kind = StrategyKind::IO;
  int shots = 0;     ///< worked examples prepended to the prompt
  int samples = 1;   ///< independent calls (SC only)
  /// Overrides the per-kind default (0.0, or 0.7 for SC sampling).
  std::optional<double> temperature;

  static StrategySpec parse(std::string_view name);  ///< throws ConfigError
  static std::vector<StrategySpec> all();            ///< the nine named variants
  std::string name() const;
  double effective_temperature() const;
  bool asks_confidence() const noexcept { return kind == StrategyKind::AR; }

  bool operator==(const StrategySpec&) const = default;
};

inline constexpr double kSelfConsistencyTemperature = 0.7;
/// Worked examples shown to each self-consistency sample.
inline constexpr int kSelfConsistencyShots = 3;

struct WorkedExample {
  UserBlock user;
  SystemBlock system;
  std::vector<std::string> reasoning;  ///< step-by-step reasoning trace
  bool decision = false;
};

struct FewShotSet {
  std::vector<WorkedExample> examples;

  /// First n examples; throws MissingAttachment if fewer are available.
  FewShotSet take(std::size_t n) const;

  nlohmann::json to_json() const;
  static FewShotSet from_json(const nlohmann::json& j);
  static FewShotSet load(const std::filesystem::path& path);
};

/// Five worked examples (positive, time, location, rating, cost) drawn from a
/// dedicated generator seed, with reasoning produced by the rule oracle.
FewShotSet default_few_shots(const TravelTimeEstimator& travel);

struct Persona {
  std::string name;
  std::string system_prompt;
  bool operator==(const Persona&) const = default;
};

/// Investigator, Forensic Examiner, Auditor.
std::vector<Persona> default_personas();
std::vector<Persona> load_personas(const std::filesystem::path& path);

struct DebateConfig {
  int max_rounds = 3;
  std::vector<Persona> panel;  ///< MAB/MAD; AR uses one provider per participant instead
  void validate(std::size_t participants) const;
};

/// Piecewise map from an elicited confidence to a voting weight:
/// 1.0 -> 1.0, [0.9, 1.0) -> 0.8, [0.8, 0.9) -> 0.5, [0.6, 0.8) -> 0.3, otherwise 0.1.
struct CalibrationTable {
  double operator()(double p) const noexcept;
};

/// Majority value; an exact tie resolves to false. Throws Error on empty input.
bool aggregate_mode(std::span<const bool> verdicts);

struct WeightedVote {
  bool decision = false;
  /// Missing confidence is weighted like p = 0.
  std::optional<double> confidence;
};

/// argmax over y of sum_i f(p_i) * [y_i == y]; ties resolve to false.
bool confidence_weighted_vote(std::span<const WeightedVote> votes, const CalibrationTable& f = {});

// ---------------------------------------------------------------------------
// Prompts

/// Line prefixes that locate the judged blocks inside a rendered prompt.
inline constexpr std::string_view kUserBlockPrefix = "User Block: ";
inline constexpr std::string_view kRecommendationPrefix = "Recommendation: ";

/// Judge-facing renderings. The user block shows the utterance and context
/// (location, date, weekday, time) but not the canonical preferences.
nlohmann::ordered_json render_user_block(const UserBlock& user);
nlohmann::ordered_json render_system_block(const SystemBlock& system);
/// Inverse of render_system_block. Throws SchemaViolation.
SystemBlock parse_rendered_system_block(const nlohmann::json& j);

/// The rule list given to every judge.
std::string_view judging_rules();

/// Builds the judge request. model_id is left empty for the caller to fill.
/// CoT/SC/AR prepend `shots` as worked examples (required, count must match);
/// a persona becomes the system message.
ChatRequest render_prompt(const StrategySpec& spec, const UserBlock& user, const SystemBlock& system,
                          const Persona* persona = nullptr, const FewShotSet* shots = nullptr);

/// Reads the first JSON object in `content`. decision accepts booleans and the
/// strings "true"/"false" in any case. Throws ParseError.
Verdict parse_verdict(std::string_view content);

// ---------------------------------------------------------------------------
// Running

struct Usage {
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  double latency_ms = 0.0;  ///< summed over calls
  Usd cost;
  int calls = 0;
  bool tokens_estimated = false;

  Usage& operator+=(const Usage& o);
  bool operator==(const Usage&) const = default;
};

struct TranscriptEntry {
  int round = 1;
  std::string participant;  ///< persona name or model id
  std::string model_id;
  std::string content;      ///< raw model output
  std::optional<Verdict> verdict;
  Usage usage;              ///< this call only
  std::string note;         ///< e.g. "parse error, retrying"
};

struct JudgeOutcome {
  Verdict verdict;
  std::vector<TranscriptEntry> transcript;
  Usage usage;
  int rounds_used = 0;
  double wall_ms = 0.0;
  /// Set when some call failed permanently; the verdict is then meaningless
  /// and the pair counts as wrongly judged.
  bool judge_failure = false;
  bool provider_exhausted = false;
  std::string failure;
};

struct JudgeContext {
  CallOptions call;
  /// Prices each call by the request's model id; null means zero cost.
  const CostTable* costs = nullptr;
};

/// Everything a strategy may need beyond the pair and its providers.
struct StrategyAssets {
  FewShotSet shots;
  std::vector<Persona> personas = default_personas();
  int max_rounds = 3;
};

JudgeOutcome run_io(const StrategySpec& spec, const UserBlock& user, const SystemBlock& system,
                    ChatProvider& provider, const JudgeContext& ctx);
JudgeOutcome run_cot(const StrategySpec& spec, const UserBlock& user, const SystemBlock& system,
                     ChatProvider& provider, const FewShotSet& shots, const JudgeContext& ctx);
JudgeOutcome run_sc(const StrategySpec& spec, const UserBlock& user, const SystemBlock& system,
                    ChatProvider& provider, const FewShotSet& shots, const JudgeContext& ctx);
JudgeOutcome run_mab(const DebateConfig& config, const UserBlock& user, const SystemBlock& system,
                     ChatProvider& provider, const JudgeContext& ctx);
JudgeOutcome run_mad(const DebateConfig& config, const UserBlock& user, const SystemBlock& system,
                     ChatProvider& provider, const JudgeContext& ctx);
/// `providers` must be distinct handles; `shots` must hold 5 examples.
JudgeOutcome run_roundtable(std::span<ChatProvider* const> providers, const UserBlock& user,
                            const SystemBlock& system, const FewShotSet& shots, const DebateConfig& config,
                            const JudgeContext& ctx);

/// Dispatches on spec.kind. AR uses every provider; the others use providers[0].
JudgeOutcome run_strategy(const StrategySpec& spec, const UserBlock& user, const SystemBlock& system,
                          std::span<ChatProvider* const> providers, const StrategyAssets& assets,
                          const JudgeContext& ctx);

}  // namespace judgebench
