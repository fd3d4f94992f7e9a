#pragma once

// Scoring: confusion counts and F1 with "misalignment detected" as the
// positive event, per-category accuracy, efficiency means/totals and
// Krippendorff's alpha for rater agreement.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "judgebench/domain.hpp"
#include "judgebench/provider.hpp"

namespace judgebench {

/// One judged pair as persisted by the harness.
struct EvaluationRecord {
  std::string pair_id;
  std::string strategy;
  std::vector<std::string> model_ids;
  bool decision = false;  ///< true = judged aligned
  std::string explanation;
  std::optional<double> confidence;
  Label label = Label::correct();  ///< ground truth
  bool judge_failure = false;
  bool provider_exhausted = false;
  std::string failure;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  bool tokens_estimated = false;
  double latency_ms = 0.0;       ///< wall time from prompt to final verdict
  double call_latency_ms = 0.0;  ///< summed provider latency
  Usd cost;
  int calls = 0;
  int rounds_used = 0;
  nlohmann::ordered_json transcript = nlohmann::ordered_json::array();

  /// A failed judgment counts as the opposite of the truth.
  bool judged_incorrect() const noexcept { return judge_failure ? label.is_correct() : !decision; }
  bool judged_right() const noexcept { return judged_incorrect() != label.is_correct(); }
  /// Model ids joined with '+'.
  std::string model_set() const;

  bool operator==(const EvaluationRecord&) const = default;
};

nlohmann::ordered_json to_json(const EvaluationRecord& r);
/// Throws SchemaViolation.
EvaluationRecord record_from_json(const nlohmann::json& j);
/// Reads a records JSONL file. A torn (unparseable) final line is ignored;
/// a bad line elsewhere throws MalformedJson.
std::vector<EvaluationRecord> read_records(const std::filesystem::path& path);

struct ConfusionCounts {
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;

  void add(bool truly_incorrect, bool judged_incorrect) noexcept;
  std::int64_t total() const noexcept { return tp + fp + tn + fn; }
  static ConfusionCounts from_records(const std::vector<EvaluationRecord>& records);
  bool operator==(const ConfusionCounts&) const = default;
};

/// Undefined values (zero denominators) are nullopt, never 0.
struct PRF1 {
  std::optional<double> precision, recall, f1;
};

PRF1 prf1(const ConfusionCounts& c);

/// Fraction of pairs per category whose judgment matches the label. Absent
/// categories are omitted.
std::map<PairCategory, double> per_category_accuracy(const std::vector<EvaluationRecord>& records);

struct EfficiencyRow {
  std::string strategy;
  std::string models;
  std::int64_t records = 0;
  std::int64_t calls = 0;
  double mean_latency_ms = 0.0;
  double mean_input_tokens = 0.0;
  double mean_output_tokens = 0.0;
  Usd mean_cost;  ///< rounded half-up to 1e-12 USD
  double total_latency_ms = 0.0;
  std::int64_t total_input_tokens = 0;
  std::int64_t total_output_tokens = 0;
  Usd total_cost;
  bool tokens_estimated = false;
};

/// Grouped by (strategy, model set), in that sort order.
std::vector<EfficiencyRow> efficiency_summary(const std::vector<EvaluationRecord>& records);

struct Summary {
  std::int64_t records = 0;
  std::int64_t judge_failures = 0;
  ConfusionCounts counts;
  PRF1 scores;
  std::map<PairCategory, double> per_category;
  std::vector<EfficiencyRow> efficiency;
};

/// Order-independent: records are sorted by (pair_id, strategy) first.
Summary summarize(std::vector<EvaluationRecord> records);
nlohmann::ordered_json to_json(const Summary& s);
/// Plain-text report.
std::string render_table(const Summary& s);
/// One row per (strategy, model set), one accuracy column per category.
std::string by_category_csv(const std::vector<EvaluationRecord>& records);

// ---------------------------------------------------------------------------
// Agreement

/// units x raters; nullopt marks a missing annotation. Values are category
/// codes (nominal) or ordered scale points such as Likert 1..5 (ordinal).
using AnnotationMatrix = std::vector<std::vector<std::optional<int>>>;

enum class AlphaMetric { Nominal, Ordinal };

/// Coincidence-matrix alpha over pairable values. Throws InsufficientData
/// with fewer than two raters, fewer than two pairable values, or no unit
/// holding two values. Returns nullopt when expected disagreement is zero.
std::optional<double> krippendorff_alpha(const AnnotationMatrix& matrix, AlphaMetric metric);

}  // namespace judgebench
