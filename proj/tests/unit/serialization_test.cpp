#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "judgebench/errors.hpp"
#include "judgebench/serialization.hpp"
#include "test_support.hpp"

namespace judgebench {
namespace {

LabeledPair sample_pair(Label label) { return LabeledPair{"p-1", jbtest::sample_user(), jbtest::sample_system(), label}; }

/// Random invariant-satisfying pair, independent of the dataset generator.
LabeledPair random_pair(std::mt19937_64& rng, int n) {
  auto real = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto integer = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  static const std::vector<std::string> districts = {"Prenzlauer Berg, Berlin", "Schwabing, München",
                                                     "Altstadt-Lehel, München", "Friedrichshain, Berlin"};
  LabeledPair p;
  p.pair_id = "r" + std::to_string(n);
  p.user.id = "u" + std::to_string(n);
  p.user.utterance = "Looking for \"something\" \xC3\xBC nice #" + std::to_string(integer(0, 1 << 20));
  p.user.location = GeoPoint{real(-90, 90), real(-180, 180), districts[integer(0, 3)]};
  p.user.date = Date::from_days_since_epoch(Date{2024, 1, 1}.days_since_epoch() + integer(0, 365));
  p.user.time = integer(480, 1320);
  p.user.cuisine = "c" + std::to_string(integer(0, 19));
  p.user.cuisine_lexical = "lex" + std::to_string(integer(0, 4));
  p.user.cost = static_cast<CostCategory>(integer(0, 2));
  p.user.cost_paraphrase = "paraphrase " + std::to_string(integer(0, 14));
  p.user.rating = RatingExpression{static_cast<RatingKind>(integer(0, 2)), integer(36, 49) / 10.0};
  p.system.venue_name = "Café " + std::to_string(integer(0, 999));
  p.system.location = GeoPoint{real(-90, 90), real(-180, 180), districts[integer(0, 3)]};
  p.system.cuisine = "c" + std::to_string(integer(0, 19));
  p.system.cost = static_cast<CostCategory>(integer(0, 2));
  p.system.rating = real(0.0, 5.0);
  for (auto d : kWeekdays) {
    Minutes t = 0;
    while (integer(0, 2) != 0) {
      const int open = t + integer(0, 300);
      const int close = open + integer(1, 400);
      if (close > kMinutesPerDay) break;
      p.system.opening_hours.on(d).push_back({open, close});
      t = close;
    }
  }
  const int l = integer(0, 5);
  p.label = l == 5 ? Label::correct() : Label::incorrect(static_cast<ErrorCategory>(l));
  return p;
}

TEST(SerializePair, CorrectLabelEncoding) {
  const auto j = nlohmann::json::parse(serialize_pair(sample_pair(Label::correct())));
  EXPECT_EQ(j["label"], nlohmann::json({{"kind", "correct"}}));
  EXPECT_EQ(j["schema"], "judge-bench/1");
}

TEST(SerializePair, IncorrectLabelEncoding) {
  const auto j = nlohmann::json::parse(serialize_pair(sample_pair(Label::incorrect(ErrorCategory::Time))));
  EXPECT_EQ(j["label"], nlohmann::json({{"kind", "incorrect"}, {"error", "time"}}));
}

TEST(SerializePair, SingleLine) {
  const auto text = serialize_pair(sample_pair(Label::correct()));
  EXPECT_EQ(text.find('\n'), std::string::npos);
}

TEST(SerializePair, RoundTripsThousandRandomPairs) {
  std::mt19937_64 rng(20240611);
  for (int i = 0; i < 1000; ++i) {
    const auto p = random_pair(rng, i);
    ASSERT_NO_THROW(validate(p.system)) << i;
    ASSERT_EQ(deserialize_pair(serialize_pair(p)), p) << serialize_pair(p);
  }
}

TEST(DeserializePair, LatitudeOutOfRange) {
  auto j = nlohmann::json::parse(serialize_pair(sample_pair(Label::correct())));
  j["user"]["location"]["lat"] = 95;
  try {
    deserialize_pair(j.dump());
    FAIL();
  } catch (const SchemaViolation& e) {
    EXPECT_EQ(e.field(), "lat");
  }
}

TEST(DeserializePair, MissingOpeningHours) {
  auto j = nlohmann::json::parse(serialize_pair(sample_pair(Label::correct())));
  j["system"].erase("opening_hours");
  try {
    deserialize_pair(j.dump());
    FAIL();
  } catch (const SchemaViolation& e) {
    EXPECT_EQ(e.field(), "opening_hours");
    EXPECT_EQ(e.reason(), "missing");
  }
}

TEST(DeserializePair, MalformedText) {
  EXPECT_THROW(deserialize_pair("{\"schema\": "), MalformedJson);
  EXPECT_THROW(deserialize_pair("[1, 2]"), SchemaViolation);
}

TEST(DeserializePair, IncorrectWithoutErrorIsRejected) {
  auto j = nlohmann::json::parse(serialize_pair(sample_pair(Label::correct())));
  j["label"] = {{"kind", "incorrect"}};
  EXPECT_THROW(deserialize_pair(j.dump()), SchemaViolation);
  j["label"] = {{"kind", "incorrect"}, {"error", "weather"}};
  EXPECT_THROW(deserialize_pair(j.dump()), SchemaViolation);
}

TEST(DeserializePair, WrongSchemaVersion) {
  auto j = nlohmann::json::parse(serialize_pair(sample_pair(Label::correct())));
  j["schema"] = "judge-bench/0";
  EXPECT_THROW(deserialize_pair(j.dump()), SchemaViolation);
}

TEST(Dataset, WriteReadAndDuplicateIds) {
  jbtest::TempDir dir;
  std::mt19937_64 rng(7);
  std::vector<LabeledPair> pairs;
  for (int i = 0; i < 20; ++i) pairs.push_back(random_pair(rng, i));
  write_dataset(dir / "d.jsonl", pairs);
  EXPECT_EQ(read_dataset(dir / "d.jsonl"), pairs);

  pairs.push_back(pairs.front());
  write_dataset(dir / "dup.jsonl", pairs);
  try {
    read_dataset(dir / "dup.jsonl");
    FAIL();
  } catch (const SchemaViolation& e) {
    EXPECT_EQ(e.field(), "pair_id");
  }
}

TEST(Dataset, ErrorsNameTheLine) {
  jbtest::TempDir dir;
  {
    std::ofstream out(dir / "bad.jsonl");
    out << serialize_pair(sample_pair(Label::correct())) << "\nnot json\n";
  }
  try {
    read_dataset(dir / "bad.jsonl");
    FAIL();
  } catch (const MalformedJson& e) {
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
}

}  // namespace
}  // namespace judgebench
