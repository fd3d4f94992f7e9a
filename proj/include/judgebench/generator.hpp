#pragma once

// Synthetic dataset generation: user blocks with context, one fully aligned
// recommendation per user block and five single-error variants of it.

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "judgebench/domain.hpp"
#include "judgebench/provider.hpp"
#include "judgebench/travel_time.hpp"

namespace judgebench {

struct CuisineEntry {
  std::string id;
  std::vector<std::string> variants;     ///< lexical variants used in utterances
  std::vector<std::string> venue_words;  ///< building blocks for venue names
};

struct GeneratorConfig {
  std::uint64_t seed = 20240601;
  std::size_t n_user_blocks = 100;
  std::vector<GeoPoint> locations;
  std::vector<CuisineEntry> cuisines;
  std::map<CostCategory, std::vector<std::string>> cost_paraphrases;
  std::vector<RatingExpression> rating_phrases;
  std::vector<std::string> utterance_frames;  ///< slots: {cuisine} {cost} {rating}
  std::vector<std::string> venue_suffixes;
  Date first_date{2024, 1, 1};
  Date last_date{2024, 12, 31};
  Minutes earliest_time = 8 * 60;
  Minutes latest_time = 22 * 60;
  /// Low-cost requests never ask for a rating above this.
  double low_cost_max_rating = 4.4;
  /// Attempts for the location-error loop before ExhaustedRetries.
  int location_retry_budget = 25;
  /// Model-backend attempts per block before BackendFailure/AlignmentFailure.
  int model_retry_budget = 3;
  /// Aligned venues are placed this far from the user (km).
  double near_min_km = 0.3, near_max_km = 2.5;
  /// Location errors are placed this far from the user (km).
  double far_min_km = 9.0, far_max_km = 20.0;
  std::string pools_version;

  /// The shipped pools (10 locations, 20 cuisines x 5 variants, 15 paraphrases
  /// per cost level, rating phrases above 3.5, 8 utterance frames).
  static GeneratorConfig defaults();
  /// Defaults overlaid with the keys present in a JSON document.
  static GeneratorConfig from_json(const nlohmann::json& overrides);
  static GeneratorConfig load(const std::filesystem::path& path);

  /// Throws ConfigError.
  void validate() const;

  const CuisineEntry& cuisine(const std::string& id) const;
  /// Category of a known paraphrase.
  std::optional<CostCategory> cost_of_paraphrase(const std::string& paraphrase) const;
  /// Rating phrases allowed for a cost level.
  std::vector<RatingExpression> rating_phrases_for(CostCategory cost) const;
};

enum class BackendKind { Template, Model };

/// Template is deterministic and offline. Model asks a chat provider for
/// utterances and venues and post-checks the answers with the rule oracle.
struct UtteranceBackend {
  BackendKind kind = BackendKind::Template;
  ChatProvider* provider = nullptr;  ///< required for Model
  CallOptions call;

  static UtteranceBackend template_backend() { return {}; }
  static UtteranceBackend model_backend(ChatProvider& provider, CallOptions call = {});
};

/// Seeded, portable random source (same sequence on every platform).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Stream derived from (seed, stream, index) with splitmix64 mixing.
  static Rng derive(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, n). n must be > 0.
  std::size_t index(std::size_t n);
  /// Uniform integer in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi);
  /// Uniform in [0, 1).
  double unit();
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  bool chance(double p) { return unit() < p; }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[index(v.size())];
  }

 private:
  std::mt19937_64 engine_;
};

/// Fills `utterance_frames[frame]` with the three phrases.
std::string fill_frame(const std::string& frame, const std::string& cuisine, const std::string& cost,
                       const std::string& rating);

std::vector<UserBlock> generate_user_blocks(const GeneratorConfig& config, const UtteranceBackend& backend);

/// Fully aligned recommendation for `user`. The travel estimator is consulted
/// so the venue stays within the drive limit under any backend.
SystemBlock generate_positive_case(const GeneratorConfig& config, const UserBlock& user,
                                   const UtteranceBackend& backend, const TravelTimeEstimator& travel,
                                   std::size_t index);

/// `base` with exactly the fields of `error` changed so that only that
/// dimension is violated.
SystemBlock generate_error_case(const GeneratorConfig& config, const UserBlock& user, const SystemBlock& base,
                                ErrorCategory error, const UtteranceBackend& backend,
                                const TravelTimeEstimator& travel, std::size_t index);

/// n_user_blocks x 6 pairs ordered by user index, then pair id. Pair ids
/// ("u001-a".."u001-f") are assigned in a seeded order and do not reveal the label.
/// `workers` > 1 generates user blocks concurrently; output is identical.
std::vector<LabeledPair> assemble_dataset(const GeneratorConfig& config, const UtteranceBackend& backend,
                                          const TravelTimeEstimator& travel, int workers = 1);

/// Copy of `broken` with the fields of dimension `c` taken from `base`.
SystemBlock restore_dimension(const SystemBlock& broken, const SystemBlock& base, ErrorCategory c);

}  // namespace judgebench
