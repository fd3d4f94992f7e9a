#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "judgebench/errors.hpp"
#include "judgebench/generator.hpp"
#include "judgebench/metrics.hpp"
#include "judgebench/providers.hpp"
#include "judgebench/strategies.hpp"
#include "test_support.hpp"

namespace judgebench {
namespace {

EvaluationRecord record(const std::string& id, Label label, bool decision, const std::string& strategy = "io") {
  EvaluationRecord r;
  r.pair_id = id;
  r.strategy = strategy;
  r.model_ids = {"m"};
  r.label = label;
  r.decision = decision;
  return r;
}

TEST(Prf1, FromCounts) {
  // 97 / (97 + 3) and 97 / (97 + 2), rounded as printed: 0.970 and 0.980.
  const auto s = prf1(ConfusionCounts{97, 3, 0, 2});
  EXPECT_NEAR(*s.precision, 0.970, 0.0005);
  EXPECT_NEAR(*s.recall, 0.980, 0.0005);
  EXPECT_NEAR(*s.f1, 0.975, 0.0005);
}

TEST(Prf1, HarmonicMeanOfPrintedValues) {
  // Counts with exactly P = 0.97 and R = 0.98.
  const auto s = prf1(ConfusionCounts{4753, 147, 0, 97});
  EXPECT_NEAR(*s.precision, 0.97, 1e-12);
  EXPECT_NEAR(*s.recall, 0.98, 1e-12);
  EXPECT_NEAR(*s.f1, 2 * 0.97 * 0.98 / (0.97 + 0.98), 1e-12);
  EXPECT_NEAR(*s.f1, 0.975, 0.0005);
}

TEST(Prf1, UndefinedIsNull) {
  const auto none = prf1(ConfusionCounts{0, 0, 10, 0});
  EXPECT_FALSE(none.precision);
  EXPECT_FALSE(none.recall);
  EXPECT_FALSE(none.f1);
  const auto no_recall = prf1(ConfusionCounts{0, 5, 0, 0});
  EXPECT_EQ(no_recall.precision, 0.0);
  EXPECT_FALSE(no_recall.recall);
  EXPECT_FALSE(no_recall.f1);
  const auto zero = prf1(ConfusionCounts{0, 5, 0, 5});
  EXPECT_EQ(zero.precision, 0.0);
  EXPECT_EQ(zero.recall, 0.0);
  EXPECT_FALSE(zero.f1);
}

TEST(Prf1, PerfectJudge) {
  const auto s = prf1(ConfusionCounts{500, 0, 100, 0});
  EXPECT_EQ(s.precision, 1.0);
  EXPECT_EQ(s.recall, 1.0);
  EXPECT_EQ(s.f1, 1.0);
}

TEST(ConfusionCounts, MatchesBruteForceRecount) {
  std::mt19937 rng(3);
  std::vector<EvaluationRecord> records;
  for (int i = 0; i < 500; ++i) {
    const int l = rng() % 6;
    auto r = record("p" + std::to_string(i), l == 5 ? Label::correct() : Label::incorrect(static_cast<ErrorCategory>(l)),
                    rng() % 2);
    r.judge_failure = rng() % 10 == 0;
    records.push_back(r);
  }
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (const auto& r : records) {
    const bool truth_bad = !r.label.is_correct();
    // A failure is scored as the wrong answer.
    const bool flagged = r.judge_failure ? !truth_bad : !r.decision;
    if (truth_bad && flagged) ++tp;
    else if (!truth_bad && flagged) ++fp;
    else if (!truth_bad) ++tn;
    else ++fn;
  }
  EXPECT_EQ(ConfusionCounts::from_records(records), (ConfusionCounts{tp, fp, tn, fn}));
}

TEST(JudgeFailure, CountsAgainstTheJudge) {
  auto good = record("a", Label::correct(), true);
  good.judge_failure = true;
  EXPECT_FALSE(good.judged_right());
  auto bad = record("b", Label::incorrect(ErrorCategory::Cost), false);
  bad.judge_failure = true;
  EXPECT_FALSE(bad.judged_right());
}

TEST(PerCategoryAccuracy, WrongOnlyOnTime) {
  std::vector<EvaluationRecord> rs;
  int n = 0;
  for (auto c : kPairCategories) {
    for (int i = 0; i < 4; ++i) {
      const auto label = c == PairCategory::Positive ? Label::correct()
                                                     : Label::incorrect(static_cast<ErrorCategory>(static_cast<int>(c) - 1));
      const bool right_answer = label.is_correct();
      rs.push_back(record("p" + std::to_string(n++), label, c == PairCategory::Time ? !right_answer : right_answer));
    }
  }
  const auto acc = per_category_accuracy(rs);
  ASSERT_EQ(acc.size(), 6u);
  for (const auto& [c, a] : acc) EXPECT_EQ(a, c == PairCategory::Time ? 0.0 : 1.0) << to_string(c);
  rs.resize(4);
  EXPECT_EQ(per_category_accuracy(rs).size(), 1u);
}

TEST(PerCategoryAccuracy, CoinFlipJudgeNearHalf) {
  const HaversineEstimator travel;
  const auto pairs = assemble_dataset(GeneratorConfig::defaults(), UtteranceBackend::template_backend(), travel);
  std::vector<UserBlock> users;
  for (const auto& p : pairs) users.push_back(p.user);
  NoisyOracleMock judge(users, std::make_shared<HaversineEstimator>(), 0.5, 20240601);
  JudgeContext ctx;
  std::vector<EvaluationRecord> rs;
  for (const auto& p : pairs) {
    const auto out = run_io(StrategySpec::parse("io"), p.user, p.system, judge, ctx);
    rs.push_back(record(p.pair_id, p.label, out.verdict.decision));
  }
  for (const auto& [c, a] : per_category_accuracy(rs)) EXPECT_NEAR(a, 0.5, 0.15) << to_string(c);
}

TEST(EfficiencySummary, MeansAndTotals) {
  auto a = record("a", Label::correct(), true);
  a.cost = Usd::parse("0.001");
  a.latency_ms = 1000;
  a.input_tokens = 10;
  auto b = record("b", Label::correct(), true);
  b.cost = Usd::parse("0.003");
  b.latency_ms = 3000;
  b.input_tokens = 31;
  auto c = record("c", Label::correct(), true, "mad");
  c.latency_ms = 5;
  const auto rows = efficiency_summary({a, b, c});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].strategy, "io");
  EXPECT_EQ(rows[0].mean_cost, Usd::parse("0.002"));
  EXPECT_EQ(rows[0].total_cost, Usd::parse("0.004"));
  EXPECT_EQ(rows[0].mean_latency_ms, 2000.0);
  EXPECT_EQ(rows[0].total_input_tokens, 41);
  EXPECT_EQ(rows[0].mean_input_tokens, 20.5);
  EXPECT_EQ(rows[1].strategy, "mad");
  EXPECT_EQ(rows[1].mean_latency_ms, 5.0);
  EXPECT_EQ(rows[1].records, 1);
}

TEST(Records, JsonRoundTripAndTornTail) {
  jbtest::TempDir dir;
  auto a = record("a", Label::incorrect(ErrorCategory::Rating), false);
  a.confidence = 0.9;
  a.cost = Usd::parse("0.000123456789");
  a.model_ids = {"x", "y"};
  a.transcript = nlohmann::ordered_json::array({{{"round", 1}}});
  auto b = record("b", Label::correct(), true);
  EXPECT_EQ(record_from_json(nlohmann::json::parse(to_json(a).dump())), a);
  EXPECT_EQ(a.model_set(), "x+y");
  {
    std::ofstream out(dir / "r.jsonl");
    out << to_json(a).dump() << "\n" << to_json(b).dump() << "\n{\"pair_id\": \"c\", \"stra";
  }
  const auto back = read_records(dir / "r.jsonl");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1], b);
  {
    std::ofstream out(dir / "bad.jsonl");
    out << "garbage\n" << to_json(b).dump() << "\n";
  }
  EXPECT_THROW(read_records(dir / "bad.jsonl"), MalformedJson);
  EXPECT_THROW(record_from_json({{"pair_id", "x"}}), SchemaViolation);
}

TEST(Summary, OrderIndependentAndRendered) {
  std::vector<EvaluationRecord> rs = {record("b", Label::correct(), true),
                                      record("a", Label::incorrect(ErrorCategory::Cost), false),
                                      record("c", Label::incorrect(ErrorCategory::Time), true)};
  auto reversed = rs;
  std::reverse(reversed.begin(), reversed.end());
  EXPECT_EQ(to_json(summarize(rs)), to_json(summarize(reversed)));
  const auto s = summarize(rs);
  EXPECT_EQ(s.counts, (ConfusionCounts{1, 0, 1, 1}));
  EXPECT_NE(render_table(s).find("  f1 "), std::string::npos);
  const auto csv = by_category_csv(rs);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "strategy,models,positive,location,time,cuisine,cost,rating");
  EXPECT_NE(csv.find("io,m,1.0000,,0.0000,,1.0000,"), std::string::npos) << csv;
}

// ---------------------------------------------------------------------------
// Krippendorff's alpha

/// Pairwise formulation, written without a coincidence matrix:
/// D_o averages disagreement over ordered within-unit pairs weighted by
/// 1/(m_u - 1); D_e averages it over all ordered pairs of pairable values.
double alpha_oracle(const AnnotationMatrix& m, bool ordinal) {
  std::vector<std::vector<int>> units;
  std::vector<int> all;
  for (const auto& row : m) {
    std::vector<int> vals;
    for (const auto& v : row)
      if (v) vals.push_back(*v);
    if (vals.size() >= 2) {
      units.push_back(vals);
      all.insert(all.end(), vals.begin(), vals.end());
    }
  }
  std::map<int, double> freq;
  for (int v : all) freq[v] += 1;
  auto delta = [&](int c, int k) -> double {
    if (c == k) return 0.0;
    if (!ordinal) return 1.0;
    const int lo = std::min(c, k), hi = std::max(c, k);
    double s = 0;
    for (const auto& [g, n] : freq)
      if (g >= lo && g <= hi) s += n;
    s -= (freq[lo] + freq[hi]) / 2.0;
    return s * s;
  };
  const double n = static_cast<double>(all.size());
  double d_o = 0;
  for (const auto& u : units) {
    double s = 0;
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t j = 0; j < u.size(); ++j)
        if (i != j) s += delta(u[i], u[j]);
    d_o += s / (static_cast<double>(u.size()) - 1);
  }
  d_o /= n;
  double d_e = 0;
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = 0; j < all.size(); ++j)
      if (i != j) d_e += delta(all[i], all[j]);
  d_e /= n * (n - 1);
  return 1.0 - d_o / d_e;
}

AnnotationMatrix random_matrix(std::mt19937& rng, int units, int raters, int categories, double missing) {
  AnnotationMatrix m(units, std::vector<std::optional<int>>(raters));
  std::uniform_real_distribution<double> u(0, 1);
  for (auto& row : m) {
    const int base = static_cast<int>(rng() % categories) + 1;
    for (auto& cell : row) {
      if (u(rng) < missing) continue;
      cell = u(rng) < 0.6 ? base : static_cast<int>(rng() % categories) + 1;
    }
  }
  // Guarantee one pairable unit with two different values.
  m[0][0] = 1;
  m[0][1] = categories;
  return m;
}

TEST(KrippendorffAlpha, PerfectAgreement) {
  const AnnotationMatrix m = {{1, 1}, {2, 2}, {3, 3}, {1, 1}};
  EXPECT_EQ(krippendorff_alpha(m, AlphaMetric::Nominal), 1.0);
  EXPECT_EQ(krippendorff_alpha(m, AlphaMetric::Ordinal), 1.0);
}

TEST(KrippendorffAlpha, HandWorkedNominalExample) {
  // (a,a), (a,a), (b,b), (a,b) with a = 0, b = 1.
  const AnnotationMatrix m = {{0, 0}, {0, 0}, {1, 1}, {0, 1}};
  EXPECT_NEAR(*krippendorff_alpha(m, AlphaMetric::Nominal), 8.0 / 15.0, 1e-9);
  EXPECT_NEAR(alpha_oracle(m, false), 8.0 / 15.0, 1e-9);
}

TEST(KrippendorffAlpha, MatchesPairwiseOracle) {
  std::mt19937 rng(17);
  for (int t = 0; t < 200; ++t) {
    const auto m = random_matrix(rng, 3 + t % 20, 2 + t % 4, 2 + t % 4, 0.2);
    EXPECT_NEAR(*krippendorff_alpha(m, AlphaMetric::Nominal), alpha_oracle(m, false), 1e-9) << t;
    EXPECT_NEAR(*krippendorff_alpha(m, AlphaMetric::Ordinal), alpha_oracle(m, true), 1e-9) << t;
  }
}

TEST(KrippendorffAlpha, OrdinalEqualsNominalOnBinaryData) {
  std::mt19937 rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto m = random_matrix(rng, 5 + t % 30, 2 + t % 5, 2, 0.15);
    EXPECT_NEAR(*krippendorff_alpha(m, AlphaMetric::Ordinal), *krippendorff_alpha(m, AlphaMetric::Nominal), 1e-9) << t;
  }
}

TEST(KrippendorffAlpha, NominalInvariantUnderRelabeling) {
  std::mt19937 rng(8);
  for (int t = 0; t < 50; ++t) {
    auto m = random_matrix(rng, 12, 3, 4, 0.1);
    const auto before = *krippendorff_alpha(m, AlphaMetric::Nominal);
    for (auto& row : m)
      for (auto& v : row)
        if (v) v = 100 - *v * 7;
    EXPECT_NEAR(*krippendorff_alpha(m, AlphaMetric::Nominal), before, 1e-12);
  }
}

TEST(KrippendorffAlpha, MissingCellsOnlyUsePairableValues) {
  const AnnotationMatrix with_lonely = {{0, 0}, {0, 0}, {1, 1}, {0, 1}, {1, std::nullopt}};
  EXPECT_NEAR(*krippendorff_alpha(with_lonely, AlphaMetric::Nominal), 8.0 / 15.0, 1e-9);
}

TEST(KrippendorffAlpha, DegenerateInputs) {
  EXPECT_FALSE(krippendorff_alpha({{1, 1}, {1, 1}}, AlphaMetric::Nominal));
  EXPECT_THROW(krippendorff_alpha({{1}, {2}}, AlphaMetric::Nominal), InsufficientData);
  EXPECT_THROW(krippendorff_alpha({{1, std::nullopt}, {std::nullopt, 2}}, AlphaMetric::Nominal), InsufficientData);
  EXPECT_THROW(krippendorff_alpha({}, AlphaMetric::Nominal), InsufficientData);
}

}  // namespace
}  // namespace judgebench
