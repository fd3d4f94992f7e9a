#pragma once

// End-to-end runs: dataset validation against the oracle, judging with a
// bounded worker pool, append-only persistence and resume.
//
// Run directory layout (<output_dir>/<run_id>/):
//   records.jsonl   one EvaluationRecord per judged pair, single writer
//   manifest.json   config snapshot and per-pair completion (write-rename)
//   runlog.jsonl    every provider attempt
//   summary.json    written once all pairs are judged

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "judgebench/domain.hpp"
#include "judgebench/metrics.hpp"
#include "judgebench/oracle.hpp"
#include "judgebench/provider.hpp"
#include "judgebench/travel_time.hpp"

namespace judgebench {

struct ProviderConfig {
  /// "oracle", "noisy" (oracle flipped with probability `noise`) or "http".
  /// "injected" marks a caller-supplied provider in a run snapshot.
  std::string kind = "oracle";
  std::string model_id;
  double noise = 0.0;
  std::uint64_t seed = 1;
  std::string endpoint;
  std::string api_key_env = "OPENAI_API_KEY";
  double timeout_s = 120.0;
  /// Unset: taken from the shipped rate table.
  std::optional<bool> supports_temperature;

  /// Short forms: "oracle", "oracle:<id>", "noisy:<q>", "noisy:<q>:<seed>",
  /// "openai:<model>", "http:<model>@<url>". Throws ConfigError.
  static ProviderConfig parse(std::string_view text);
  /// Accepts a short-form string or an object with the field names above.
  static ProviderConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
  bool is_mock() const noexcept { return kind == "oracle" || kind == "noisy"; }
};

struct TravelConfig {
  std::string kind = "haversine";  ///< haversine | routing
  double speed_kmh = HaversineEstimator::kDefaultSpeedKmh;
  RoutingApiConfig routing;

  static TravelConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
  std::shared_ptr<TravelTimeEstimator> make() const;
};

struct RunConfig {
  std::filesystem::path dataset;
  std::string strategy = "io";
  std::vector<ProviderConfig> providers;
  int concurrency = 4;
  int max_attempts = 3;
  int initial_delay_ms = 500;
  double backoff_multiplier = 2.0;
  std::filesystem::path output_dir = "runs";
  std::string run_id;
  bool resume = false;
  bool skip_validate = false;
  /// Stop after judging this many pending pairs (a controlled interruption).
  std::optional<std::size_t> max_pairs;
  int max_rounds = 3;
  std::filesystem::path rates;     ///< optional CostTable JSON; default July 2025
  std::filesystem::path shots;     ///< optional FewShotSet JSON; default built-in
  std::filesystem::path personas;  ///< optional persona JSON; default built-in
  TravelConfig travel;

  /// Keys mirror the CLI flags (dataset, strategy, providers, concurrency,
  /// max_attempts, initial_delay_ms, backoff_multiplier, output_dir, run_id,
  /// resume, skip_validate, max_pairs, max_rounds, rates, shots, personas, travel).
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);
  nlohmann::ordered_json to_json() const;
  /// Throws ConfigError.
  void validate() const;
  std::filesystem::path run_dir() const { return output_dir / run_id; }
  RetryPolicy retry_policy() const;
};

struct ValidationIssue {
  std::string pair_id;
  Label expected = Label::correct();
  OracleVerdict oracle;
  std::string detail;
};

struct ValidationReport {
  std::size_t pairs = 0;
  std::vector<ValidationIssue> disagreements;
  /// Error pairs whose error dimension, copied back from the user's positive
  /// pair, still does not judge correct.
  std::vector<ValidationIssue> restore_failures;
  bool ok() const noexcept { return disagreements.empty() && restore_failures.empty(); }
  nlohmann::ordered_json to_json() const;
};

ValidationReport validate_dataset(const std::vector<LabeledPair>& pairs, const TravelTimeEstimator& travel,
                                  int workers = 1);

struct RunResult {
  std::filesystem::path run_dir;
  std::size_t dataset_pairs = 0;
  std::size_t skipped = 0;     ///< already judged before this invocation
  std::size_t judged_now = 0;
  std::size_t total_records = 0;
  bool complete = false;
  /// "<pair_id>: <message>" for pairs whose provider calls were exhausted.
  std::vector<std::string> provider_failures;
  /// Present once every pair has a record.
  std::optional<Summary> summary;
};

/// Builds providers from config.providers. Throws ConfigError,
/// DatasetInvalid, or Error for I/O problems.
RunResult run_benchmark(const RunConfig& config);

/// Same, with caller-supplied providers (config.providers is ignored).
/// Models missing from the rate table are priced at zero.
RunResult run_benchmark(const RunConfig& config, const std::vector<std::shared_ptr<ChatProvider>>& providers);

/// Recomputes the summary from a run directory's persisted records.
Summary report_run(const std::filesystem::path& run_dir);

/// Progress messages go to stderr; quiet keeps only warnings and errors.
void configure_logging(bool quiet);

}  // namespace judgebench
