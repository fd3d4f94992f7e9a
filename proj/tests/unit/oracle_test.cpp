#include <gtest/gtest.h>

#include "judgebench/oracle.hpp"
#include "test_support.hpp"

namespace judgebench {
namespace {

class FixedEstimator final : public TravelTimeEstimator {
 public:
  explicit FixedEstimator(double minutes) : minutes_(minutes) {}
  double estimate(const GeoPoint&, const GeoPoint&) const override { return minutes_; }
  std::string describe() const override { return "fixed"; }

 private:
  double minutes_;
};

const HaversineEstimator kHaversine;

TEST(JudgePair, AlignedPairIsCorrect) {
  const auto v = judge_pair(jbtest::sample_user(), jbtest::sample_system(), kHaversine);
  EXPECT_TRUE(v.correct);
  EXPECT_TRUE(v.violations.empty());
}

TEST(JudgePair, MondayCloseAtEightBeforeRequestAtEightThirtyFive) {
  auto s = jbtest::sample_system();
  s.opening_hours.on(Weekday::Mon) = {{720, 1200}};
  const auto v = judge_pair(jbtest::sample_user(), s, kHaversine);
  EXPECT_FALSE(v.correct);
  EXPECT_EQ(v.violations, std::set<ErrorCategory>{ErrorCategory::Time});
}

TEST(JudgePair, SixteenMinutesAwayIsLocationError) {
  const auto v = judge_pair(jbtest::sample_user(), jbtest::sample_system(), FixedEstimator(16.0));
  EXPECT_EQ(v.violations, std::set<ErrorCategory>{ErrorCategory::Location});
}

TEST(JudgePair, FifteenMinutesExactlyIsFine) {
  EXPECT_TRUE(judge_pair(jbtest::sample_user(), jbtest::sample_system(), FixedEstimator(15.0)).correct);
  EXPECT_FALSE(judge_pair(jbtest::sample_user(), jbtest::sample_system(), FixedEstimator(15.0001)).correct);
}

TEST(JudgePair, AroundFourVersusFourPointThree) {
  auto u = jbtest::sample_user();
  u.rating = {RatingKind::Around, 4.0};
  auto s = jbtest::sample_system();
  s.rating = 4.3;
  EXPECT_EQ(judge_pair(u, s, kHaversine).violations, std::set<ErrorCategory>{ErrorCategory::Rating});
}

TEST(RatingSatisfies, AroundBandIsInclusiveAtOneDecimal) {
  for (double r : {3.8, 3.9, 4.0, 4.1, 4.2}) EXPECT_TRUE(rating_satisfies({RatingKind::Around, 4.0}, r)) << r;
  for (double r : {3.7, 4.3}) EXPECT_FALSE(rating_satisfies({RatingKind::Around, 4.0}, r)) << r;
  // 4.2 - 4.0 is 0.20000000000000018 in binary.
  EXPECT_TRUE(rating_satisfies({RatingKind::Around, 4.0}, 4.0 + 0.2));
}

TEST(RatingSatisfies, AtLeastAndAboveAreInclusive) {
  EXPECT_TRUE(rating_satisfies({RatingKind::AtLeast, 4.5}, 4.5));
  EXPECT_TRUE(rating_satisfies({RatingKind::Above, 4.5}, 4.5));
  EXPECT_FALSE(rating_satisfies({RatingKind::Above, 4.5}, 4.4));
  EXPECT_TRUE(rating_satisfies({RatingKind::AtLeast, 4.1}, 4.1));
}

TEST(JudgePair, EveryDimensionIsIndependent) {
  const auto u = jbtest::sample_user();
  auto s = jbtest::sample_system();
  s.cuisine = "thai";
  s.cost = CostCategory::High;
  s.rating = 3.0;
  s.opening_hours.on(Weekday::Mon).clear();
  const auto v = judge_pair(u, s, FixedEstimator(30.0));
  EXPECT_EQ(v.violations.size(), 5u);

  // Relaxing one dimension removes exactly that violation.
  auto relaxed = s;
  relaxed.cuisine = u.cuisine;
  auto w = judge_pair(u, relaxed, FixedEstimator(30.0));
  EXPECT_EQ(w.violations.size(), 4u);
  EXPECT_FALSE(w.violations.count(ErrorCategory::Cuisine));
}

TEST(ExplainPair, OneLinePerDimension) {
  auto s = jbtest::sample_system();
  s.cost = CostCategory::Low;
  const auto text = explain_pair(jbtest::sample_user(), s, kHaversine);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
  EXPECT_NE(text.find("Cost: INCORRECT"), std::string::npos);
  EXPECT_NE(text.find("Location: CORRECT"), std::string::npos);
}

}  // namespace
}  // namespace judgebench
