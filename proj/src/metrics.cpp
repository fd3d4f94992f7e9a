#include "judgebench/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "judgebench/errors.hpp"
#include "judgebench/serialization.hpp"

namespace judgebench {

std::string EvaluationRecord::model_set() const {
  std::string out;
  for (const auto& m : model_ids) out += (out.empty() ? "" : "+") + m;
  return out;
}

nlohmann::ordered_json to_json(const EvaluationRecord& r) {
  nlohmann::ordered_json j;
  j["pair_id"] = r.pair_id;
  j["strategy"] = r.strategy;
  j["model_ids"] = r.model_ids;
  j["decision"] = r.decision;
  j["explanation"] = r.explanation;
  j["confidence"] = r.confidence ? nlohmann::ordered_json(*r.confidence) : nlohmann::ordered_json(nullptr);
  j["label"] = to_json(r.label);
  j["judge_failure"] = r.judge_failure;
  j["provider_exhausted"] = r.provider_exhausted;
  j["failure"] = r.failure;
  j["input_tokens"] = r.input_tokens;
  j["output_tokens"] = r.output_tokens;
  j["tokens_estimated"] = r.tokens_estimated;
  j["latency_ms"] = r.latency_ms;
  j["call_latency_ms"] = r.call_latency_ms;
  j["cost_usd"] = r.cost.str(12);
  j["calls"] = r.calls;
  j["rounds_used"] = r.rounds_used;
  j["transcript"] = r.transcript;
  return j;
}

EvaluationRecord record_from_json(const nlohmann::json& j) {
  EvaluationRecord r;
  std::string field;
  try {
    auto get = [&](const char* name) -> const nlohmann::json& {
      field = name;
      if (!j.contains(name)) throw SchemaViolation(name, "missing");
      return j.at(name);
    };
    r.pair_id = get("pair_id").get<std::string>();
    r.strategy = get("strategy").get<std::string>();
    r.model_ids = get("model_ids").get<std::vector<std::string>>();
    r.decision = get("decision").get<bool>();
    r.explanation = get("explanation").get<std::string>();
    if (const auto& c = get("confidence"); !c.is_null()) r.confidence = c.get<double>();
    r.label = label_from_json(Json(get("label")));
    r.judge_failure = get("judge_failure").get<bool>();
    r.provider_exhausted = get("provider_exhausted").get<bool>();
    r.failure = get("failure").get<std::string>();
    r.input_tokens = get("input_tokens").get<std::int64_t>();
    r.output_tokens = get("output_tokens").get<std::int64_t>();
    r.tokens_estimated = get("tokens_estimated").get<bool>();
    r.latency_ms = get("latency_ms").get<double>();
    r.call_latency_ms = get("call_latency_ms").get<double>();
    r.cost = Usd::parse(get("cost_usd").get<std::string>());
    r.calls = get("calls").get<int>();
    r.rounds_used = get("rounds_used").get<int>();
    if (j.contains("transcript")) r.transcript = nlohmann::ordered_json(j.at("transcript"));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaViolation(field, e.what());
  }
  return r;
}

std::vector<EvaluationRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open records file " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) lines.push_back(std::move(line));
  std::vector<EvaluationRecord> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto j = nlohmann::ordered_json::parse(lines[i], nullptr, false);
    if (j.is_discarded()) {
      if (i + 1 == lines.size()) break;  // torn tail from an interrupted run
      throw MalformedJson(path.string() + ":" + std::to_string(i + 1) + ": not JSON");
    }
    out.push_back(record_from_json(j));
  }
  return out;
}

// ---------------------------------------------------------------------------

void ConfusionCounts::add(bool truly_incorrect, bool judged_incorrect) noexcept {
  if (truly_incorrect) (judged_incorrect ? tp : fn) += 1;
  else (judged_incorrect ? fp : tn) += 1;
}

ConfusionCounts ConfusionCounts::from_records(const std::vector<EvaluationRecord>& records) {
  ConfusionCounts c;
  for (const auto& r : records) c.add(!r.label.is_correct(), r.judged_incorrect());
  return c;
}

PRF1 prf1(const ConfusionCounts& c) {
  PRF1 out;
  if (c.tp + c.fp > 0) out.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) out.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (out.precision && out.recall && *out.precision + *out.recall > 0.0)
    out.f1 = 2.0 * *out.precision * *out.recall / (*out.precision + *out.recall);
  return out;
}

std::map<PairCategory, double> per_category_accuracy(const std::vector<EvaluationRecord>& records) {
  std::map<PairCategory, std::pair<std::int64_t, std::int64_t>> tally;  // right, total
  for (const auto& r : records) {
    auto& t = tally[category_of(r.label)];
    t.first += r.judged_right() ? 1 : 0;
    t.second += 1;
  }
  std::map<PairCategory, double> out;
  for (const auto& [cat, t] : tally) out[cat] = static_cast<double>(t.first) / static_cast<double>(t.second);
  return out;
}

namespace {

Usd mean_usd(Usd total, std::int64_t n) {
  if (n <= 0) return {};
  const auto p = total.picos();
  return Usd::from_picos((p + n / 2) / n);
}

}  // namespace

std::vector<EfficiencyRow> efficiency_summary(const std::vector<EvaluationRecord>& records) {
  std::map<std::pair<std::string, std::string>, EfficiencyRow> groups;
  for (const auto& r : records) {
    auto& row = groups[{r.strategy, r.model_set()}];
    row.strategy = r.strategy;
    row.models = r.model_set();
    row.records += 1;
    row.calls += r.calls;
    row.total_latency_ms += r.latency_ms;
    row.total_input_tokens += r.input_tokens;
    row.total_output_tokens += r.output_tokens;
    row.total_cost += r.cost;
    row.tokens_estimated = row.tokens_estimated || r.tokens_estimated;
  }
  std::vector<EfficiencyRow> out;
  for (auto& [key, row] : groups) {
    const auto n = static_cast<double>(row.records);
    row.mean_latency_ms = row.total_latency_ms / n;
    row.mean_input_tokens = static_cast<double>(row.total_input_tokens) / n;
    row.mean_output_tokens = static_cast<double>(row.total_output_tokens) / n;
    row.mean_cost = mean_usd(row.total_cost, row.records);
    out.push_back(std::move(row));
  }
  return out;
}

Summary summarize(std::vector<EvaluationRecord> records) {
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.pair_id, a.strategy) < std::tie(b.pair_id, b.strategy);
  });
  Summary s;
  s.records = static_cast<std::int64_t>(records.size());
  s.judge_failures = std::count_if(records.begin(), records.end(), [](const auto& r) { return r.judge_failure; });
  s.counts = ConfusionCounts::from_records(records);
  s.scores = prf1(s.counts);
  s.per_category = per_category_accuracy(records);
  s.efficiency = efficiency_summary(records);
  return s;
}

namespace {

nlohmann::ordered_json opt(std::optional<double> v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::string fmt_opt(std::optional<double> v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}

std::string fmt(double v, const char* f = "%.3f") {
  char buf[48];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

nlohmann::ordered_json to_json(const Summary& s) {
  nlohmann::ordered_json j;
  j["records"] = s.records;
  j["judge_failures"] = s.judge_failures;
  j["confusion"] = {{"tp", s.counts.tp}, {"fp", s.counts.fp}, {"tn", s.counts.tn}, {"fn", s.counts.fn}};
  j["precision"] = opt(s.scores.precision);
  j["recall"] = opt(s.scores.recall);
  j["f1"] = opt(s.scores.f1);
  nlohmann::ordered_json cats = nlohmann::ordered_json::object();
  for (auto c : kPairCategories)
    if (auto it = s.per_category.find(c); it != s.per_category.end()) cats[std::string(to_string(c))] = it->second;
  j["per_category_accuracy"] = std::move(cats);
  auto eff = nlohmann::ordered_json::array();
  for (const auto& e : s.efficiency) {
    eff.push_back({{"strategy", e.strategy},
                   {"models", e.models},
                   {"records", e.records},
                   {"calls", e.calls},
                   {"mean_latency_ms", e.mean_latency_ms},
                   {"mean_input_tokens", e.mean_input_tokens},
                   {"mean_output_tokens", e.mean_output_tokens},
                   {"mean_cost_usd", e.mean_cost.str(12)},
                   {"total_latency_ms", e.total_latency_ms},
                   {"total_input_tokens", e.total_input_tokens},
                   {"total_output_tokens", e.total_output_tokens},
                   {"total_cost_usd", e.total_cost.str(12)},
                   {"tokens_estimated", e.tokens_estimated}});
  }
  j["efficiency"] = std::move(eff);
  return j;
}

std::string render_table(const Summary& s) {
  std::ostringstream out;
  out << "records " << s.records << ", judge failures " << s.judge_failures << "\n";
  out << "tp " << s.counts.tp << "  fp " << s.counts.fp << "  tn " << s.counts.tn << "  fn " << s.counts.fn << "\n";
  out << "precision " << fmt_opt(s.scores.precision) << "  recall " << fmt_opt(s.scores.recall) << "  f1 "
      << fmt_opt(s.scores.f1) << "\n\n";
  out << "category   accuracy\n";
  for (auto c : kPairCategories)
    if (auto it = s.per_category.find(c); it != s.per_category.end()) {
      std::string name(to_string(c));
      name.resize(11, ' ');
      out << name << fmt(it->second) << "\n";
    }
  out << "\nstrategy  models  n  mean_latency_ms  mean_tokens_in  mean_tokens_out  mean_cost_usd  total_cost_usd\n";
  for (const auto& e : s.efficiency) {
    out << e.strategy << "  " << e.models << "  " << e.records << "  " << fmt(e.mean_latency_ms, "%.1f") << "  "
        << fmt(e.mean_input_tokens, "%.1f") << "  " << fmt(e.mean_output_tokens, "%.1f") << "  "
        << e.mean_cost.str(6) << "  " << e.total_cost.str(6) << (e.tokens_estimated ? "  (tokens estimated)" : "")
        << "\n";
  }
  return out.str();
}

std::string by_category_csv(const std::vector<EvaluationRecord>& records) {
  std::map<std::pair<std::string, std::string>, std::vector<EvaluationRecord>> groups;
  for (const auto& r : records) groups[{r.strategy, r.model_set()}].push_back(r);
  std::ostringstream out;
  out << "strategy,models";
  for (auto c : kPairCategories) out << "," << to_string(c);
  out << "\n";
  for (const auto& [key, rs] : groups) {
    const auto acc = per_category_accuracy(rs);
    out << key.first << "," << key.second;
    for (auto c : kPairCategories) {
      out << ",";
      if (auto it = acc.find(c); it != acc.end()) out << fmt(it->second, "%.4f");
    }
    out << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------

std::optional<double> krippendorff_alpha(const AnnotationMatrix& matrix, AlphaMetric metric) {
  std::size_t raters = 0;
  for (const auto& unit : matrix) raters = std::max(raters, unit.size());
  if (raters < 2) throw InsufficientData("alpha needs at least two raters");

  // Value domain, in scale order.
  std::set<int> domain;
  for (const auto& unit : matrix)
    for (const auto& v : unit)
      if (v) domain.insert(*v);
  const std::vector<int> values(domain.begin(), domain.end());
  const auto k = values.size();
  auto idx = [&](int v) { return static_cast<std::size_t>(std::lower_bound(values.begin(), values.end(), v) - values.begin()); };

  // Coincidence matrix over pairable values.
  std::vector<std::vector<double>> o(k, std::vector<double>(k, 0.0));
  bool any_pairable_unit = false;
  for (const auto& unit : matrix) {
    std::vector<std::size_t> present;
    for (const auto& v : unit)
      if (v) present.push_back(idx(*v));
    const auto m = present.size();
    if (m < 2) continue;
    any_pairable_unit = true;
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        if (a != b) o[present[a]][present[b]] += 1.0 / static_cast<double>(m - 1);
  }
  if (!any_pairable_unit) throw InsufficientData("no unit has two or more values");

  std::vector<double> n_c(k, 0.0);
  double n = 0.0;
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t d = 0; d < k; ++d) n_c[c] += o[c][d];
  for (double x : n_c) n += x;
  if (n < 2.0) throw InsufficientData("fewer than two pairable values");

  auto delta2 = [&](std::size_t c, std::size_t d) -> double {
    if (c == d) return 0.0;
    if (metric == AlphaMetric::Nominal) return 1.0;
    const auto lo = std::min(c, d), hi = std::max(c, d);
    double s = 0.0;
    for (std::size_t g = lo; g <= hi; ++g) s += n_c[g];
    s -= (n_c[lo] + n_c[hi]) / 2.0;
    return s * s;
  };

  double d_o = 0.0, d_e = 0.0;
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t d = 0; d < k; ++d) {
      const double w = delta2(c, d);
      d_o += o[c][d] * w;
      d_e += n_c[c] * n_c[d] * w;
    }
  d_o /= n;
  d_e /= n * (n - 1.0);
  if (d_e == 0.0) return std::nullopt;
  return 1.0 - d_o / d_e;
}

}  // namespace judgebench
