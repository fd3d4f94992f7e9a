#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "judgebench/errors.hpp"
#include "judgebench/generator.hpp"
#include "judgebench/oracle.hpp"
#include "judgebench/providers.hpp"
#include "judgebench/serialization.hpp"
#include "test_support.hpp"

namespace judgebench {
namespace {

const HaversineEstimator kTravel;

std::string dataset_bytes(const std::vector<LabeledPair>& pairs) {
  std::string out;
  for (const auto& p : pairs) out += serialize_pair(p) + "\n";
  return out;
}

class DefaultDataset : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    config_ = new GeneratorConfig(GeneratorConfig::defaults());
    pairs_ = new std::vector<LabeledPair>(assemble_dataset(*config_, UtteranceBackend::template_backend(), kTravel));
  }
  static void TearDownTestSuite() {
    delete pairs_;
    delete config_;
  }
  static GeneratorConfig* config_;
  static std::vector<LabeledPair>* pairs_;
};
GeneratorConfig* DefaultDataset::config_ = nullptr;
std::vector<LabeledPair>* DefaultDataset::pairs_ = nullptr;

TEST(GeneratorConfig, ShippedPoolSizes) {
  const auto c = GeneratorConfig::defaults();
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.n_user_blocks, 100u);
  EXPECT_EQ(c.locations.size(), 10u);
  EXPECT_EQ(c.cuisines.size(), 20u);
  for (const auto& cu : c.cuisines) EXPECT_EQ(cu.variants.size(), 5u) << cu.id;
  for (auto level : {CostCategory::Low, CostCategory::Medium, CostCategory::High})
    EXPECT_EQ(c.cost_paraphrases.at(level).size(), 15u);
  EXPECT_EQ(c.utterance_frames.size(), 8u);
  for (const auto& r : c.rating_phrases) EXPECT_GT(r.value, 3.5);
  for (const auto& r : c.rating_phrases_for(CostCategory::Low)) EXPECT_LE(r.value, 4.4);
}

TEST(GeneratorConfig, ParaphrasesAreUnambiguous) {
  const auto c = GeneratorConfig::defaults();
  std::set<std::string> seen;
  for (const auto& [level, list] : c.cost_paraphrases)
    for (const auto& p : list) {
      EXPECT_TRUE(seen.insert(p).second) << p;
      EXPECT_EQ(c.cost_of_paraphrase(p), level);
    }
}

TEST(GeneratorConfig, OverlayAndValidation) {
  auto c = GeneratorConfig::from_json({{"seed", 5}, {"n_user_blocks", 7}, {"earliest_time", "13:15"}, {"latest_time", "13:15"}});
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.n_user_blocks, 7u);
  EXPECT_THROW(GeneratorConfig::from_json({{"earliest_time", "07:00"}}).validate(), ConfigError);
}

TEST(Rng, DerivedStreamsAreStableAndIndependent) {
  auto a = Rng::derive(1, 2, 3), b = Rng::derive(1, 2, 3), c = Rng::derive(1, 2, 4);
  const auto x = a.next();
  EXPECT_EQ(x, b.next());
  EXPECT_NE(x, c.next());
  Rng r(11);
  for (int i = 0; i < 10000; ++i) {
    const auto k = r.index(7);
    ASSERT_LT(k, 7u);
    const double u = r.unit();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(GenerateUserBlocks, CollapsedTimeRange) {
  auto c = GeneratorConfig::defaults();
  c.n_user_blocks = 30;
  c.earliest_time = c.latest_time = 13 * 60 + 15;
  for (const auto& u : generate_user_blocks(c, UtteranceBackend::template_backend())) EXPECT_EQ(u.time, 13 * 60 + 15);
}

TEST_F(DefaultDataset, HundredUsersSixHundredPairs) {
  EXPECT_EQ(pairs_->size(), 600u);
  std::map<PairCategory, int> histogram;
  std::set<std::string> users, ids;
  for (const auto& p : *pairs_) {
    ++histogram[category_of(p.label)];
    users.insert(p.user.id);
    EXPECT_TRUE(ids.insert(p.pair_id).second) << p.pair_id;
  }
  EXPECT_EQ(users.size(), 100u);
  for (auto c : kPairCategories) EXPECT_EQ(histogram[c], 100) << to_string(c);
}

TEST_F(DefaultDataset, UserBlockInvariants) {
  for (const auto& p : *pairs_) {
    const auto& u = p.user;
    ASSERT_NO_THROW(validate(u));
    EXPECT_EQ(u.date.year, 2024);
    EXPECT_GE(u.time, 480);
    EXPECT_LE(u.time, 1320);
    EXPECT_GT(u.rating.value, 3.5);
    EXPECT_NEAR(u.rating.value * 10.0, std::round(u.rating.value * 10.0), 1e-9);
    const auto& variants = config_->cuisine(u.cuisine).variants;
    EXPECT_NE(std::find(variants.begin(), variants.end(), u.cuisine_lexical), variants.end());
    EXPECT_EQ(config_->cost_of_paraphrase(u.cost_paraphrase), u.cost);
    EXPECT_NE(u.utterance.find(u.cuisine_lexical), std::string::npos) << u.utterance;
    EXPECT_NE(u.utterance.find(u.cost_paraphrase), std::string::npos) << u.utterance;
    EXPECT_NE(u.utterance.find(rating_phrase(u.rating)), std::string::npos) << u.utterance;
    if (u.cost == CostCategory::Low) EXPECT_LE(u.rating.value, 4.4);
  }
}

TEST_F(DefaultDataset, OracleAgreesWithEveryLabel) {
  for (const auto& p : *pairs_) {
    const auto v = judge_pair(p.user, p.system, kTravel);
    if (p.label.is_correct()) EXPECT_TRUE(v.correct) << p.pair_id;
    else EXPECT_EQ(v.violations, std::set<ErrorCategory>{p.label.error()}) << p.pair_id;
  }
}

TEST_F(DefaultDataset, ErrorPairsDifferFromBaseOnlyInTheirDimension) {
  std::map<std::string, SystemBlock> base;
  for (const auto& p : *pairs_)
    if (p.label.is_correct()) base[p.user.id] = p.system;
  for (const auto& p : *pairs_) {
    if (p.label.is_correct()) continue;
    const auto& b = base.at(p.user.id);
    EXPECT_EQ(restore_dimension(p.system, b, p.label.error()), b) << p.pair_id;
    EXPECT_TRUE(judge_pair(p.user, restore_dimension(p.system, b, p.label.error()), kTravel).correct);
    if (p.label.error() == ErrorCategory::Location) EXPECT_GT(kTravel.estimate(p.user.location, p.system.location), 15.0);
  }
}

TEST_F(DefaultDataset, CoversEveryPoolEntry) {
  std::set<std::string> cuisines, locations;
  std::set<CostCategory> costs;
  for (const auto& p : *pairs_) {
    cuisines.insert(p.user.cuisine);
    locations.insert(p.user.location.district_label);
    costs.insert(p.user.cost);
  }
  EXPECT_EQ(cuisines.size(), 20u);
  EXPECT_EQ(locations.size(), 10u);
  EXPECT_EQ(costs.size(), 3u);
}

TEST_F(DefaultDataset, IdsDoNotRevealLabels) {
  // The positive case must not always sit at the same letter.
  std::set<char> positive_letters;
  for (const auto& p : *pairs_)
    if (p.label.is_correct()) positive_letters.insert(p.pair_id.back());
  EXPECT_GT(positive_letters.size(), 3u);
}

TEST_F(DefaultDataset, SameSeedSameBytes) {
  const auto again = assemble_dataset(*config_, UtteranceBackend::template_backend(), kTravel);
  EXPECT_EQ(dataset_bytes(again), dataset_bytes(*pairs_));
  const auto parallel = assemble_dataset(*config_, UtteranceBackend::template_backend(), kTravel, 8);
  EXPECT_EQ(dataset_bytes(parallel), dataset_bytes(*pairs_));
  auto other = *config_;
  other.seed += 1;
  EXPECT_NE(dataset_bytes(assemble_dataset(other, UtteranceBackend::template_backend(), kTravel)),
            dataset_bytes(*pairs_));
}

TEST(GenerateErrorCase, TimeErrorExcludesRequestedMinute) {
  const auto c = GeneratorConfig::defaults();
  auto user = jbtest::sample_user();
  auto base = jbtest::sample_system();
  base.opening_hours = OpeningHours::every_day({{720, 1440}});
  const auto broken = generate_error_case(c, user, base, ErrorCategory::Time, UtteranceBackend::template_backend(),
                                          kTravel, 0);
  EXPECT_FALSE(is_open_at(broken.opening_hours, user.date, user.time));
  EXPECT_EQ(restore_dimension(broken, base, ErrorCategory::Time), base);
}

TEST(GenerateErrorCase, RatingBelowAtLeast) {
  const auto c = GeneratorConfig::defaults();
  auto user = jbtest::sample_user();
  user.rating = {RatingKind::AtLeast, 4.5};
  auto base = jbtest::sample_system();
  base.rating = 4.6;
  for (std::size_t i = 0; i < 50; ++i) {
    const auto broken = generate_error_case(c, user, base, ErrorCategory::Rating,
                                            UtteranceBackend::template_backend(), kTravel, i);
    EXPECT_LT(broken.rating, 4.5);
    EXPECT_EQ(restore_dimension(broken, base, ErrorCategory::Rating), base);
  }
}

TEST(GenerateErrorCase, LocationLoopGivesUp) {
  auto c = GeneratorConfig::defaults();
  c.far_min_km = 0.5;
  c.far_max_km = 1.0;
  EXPECT_THROW(generate_error_case(c, jbtest::sample_user(), jbtest::sample_system(), ErrorCategory::Location,
                                   UtteranceBackend::template_backend(), kTravel, 0),
               ExhaustedRetries);
}

/// Answers utterance prompts with the quoted phrases, and venue prompts
/// with a fixed block.
class ModelStandIn final : public ChatProvider {
 public:
  explicit ModelStandIn(SystemBlock venue) : venue_(std::move(venue)) {}
  const std::string& model_id() const override { return id_; }
  ChatResponse send(const ChatRequest& request) override {
    ++calls;
    const auto& text = request.messages.back().content;
    ChatResponse r;
    if (text.find("exact phrases") != std::string::npos) {
      std::regex quoted("\"([^\"]+)\"");
      std::string out = "Please find";
      for (auto it = std::sregex_iterator(text.begin(), text.end(), quoted); it != std::sregex_iterator(); ++it)
        out += " " + (*it)[1].str();
      r.content = out;
    } else {
      r.content = "Here you go: " + to_json(venue_).dump();
    }
    return r;
  }
  int calls = 0;

 private:
  std::string id_ = "model-stand-in";
  SystemBlock venue_;
};

TEST(ModelBackend, UtterancesAndAlignedVenue) {
  auto c = GeneratorConfig::defaults();
  c.n_user_blocks = 3;
  ModelStandIn model(jbtest::sample_system());
  const auto users = generate_user_blocks(c, UtteranceBackend::model_backend(model));
  ASSERT_EQ(users.size(), 3u);
  for (const auto& u : users) EXPECT_NE(u.utterance.find(u.cost_paraphrase), std::string::npos);

  const auto block = generate_positive_case(c, jbtest::sample_user(), UtteranceBackend::model_backend(model), kTravel, 0);
  EXPECT_EQ(block, jbtest::sample_system());
}

TEST(ModelBackend, ClosedVenueExhaustsRetries) {
  auto closed = jbtest::sample_system();
  closed.opening_hours = OpeningHours{};
  ModelStandIn model(closed);
  const auto c = GeneratorConfig::defaults();
  EXPECT_THROW(generate_positive_case(c, jbtest::sample_user(), UtteranceBackend::model_backend(model), kTravel, 0),
               AlignmentFailure);
  EXPECT_EQ(model.calls, c.model_retry_budget);
}

TEST(ModelBackend, ProviderFailureNamesTheIndex) {
  ScriptedMock broken;
  broken.script({ScriptedMock::Failure{400, "bad request"}});
  auto c = GeneratorConfig::defaults();
  c.n_user_blocks = 1;
  try {
    generate_user_blocks(c, UtteranceBackend::model_backend(broken));
    FAIL();
  } catch (const BackendFailure& e) {
    EXPECT_EQ(e.index(), 0u);
  }
}

}  // namespace
}  // namespace judgebench
