#include "judgebench/serialization.hpp"

#include <fstream>
#include <unordered_set>

#include "judgebench/errors.hpp"

namespace judgebench {

namespace {

const Json& require(const Json& obj, const char* field) {
  if (!obj.is_object()) throw SchemaViolation(field, "parent is not an object");
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) throw SchemaViolation(field, "missing");
  return *it;
}

std::string get_string(const Json& obj, const char* field) {
  const auto& v = require(obj, field);
  if (!v.is_string()) throw SchemaViolation(field, "expected string");
  return v.get<std::string>();
}

double get_number(const Json& obj, const char* field) {
  const auto& v = require(obj, field);
  if (!v.is_number()) throw SchemaViolation(field, "expected number");
  return v.get<double>();
}

int get_int(const Json& obj, const char* field) {
  const auto& v = require(obj, field);
  if (!v.is_number_integer()) throw SchemaViolation(field, "expected integer");
  return v.get<int>();
}

CostCategory get_cost(const Json& obj) {
  auto c = cost_from_string(get_string(obj, "cost"));
  if (!c) throw SchemaViolation("cost", "expected low|medium|high");
  return *c;
}

}  // namespace

Json to_json(const GeoPoint& p) {
  return Json{{"lat", p.lat}, {"lon", p.lon}, {"district_label", p.district_label}};
}

Json to_json(const RatingExpression& r) { return Json{{"kind", to_string(r.kind)}, {"value", r.value}}; }

Json to_json(const OpeningHours& h) {
  Json out = Json::object();
  for (auto d : kWeekdays) {
    Json day = Json::array();
    for (const auto& iv : h.on(d)) day.push_back(Json::array({iv.open, iv.close}));
    out[std::string(to_string(d))] = std::move(day);
  }
  return out;
}

Json to_json(const UserBlock& u) {
  return Json{{"id", u.id},
              {"utterance", u.utterance},
              {"location", to_json(u.location)},
              {"date", u.date.iso()},
              {"time", u.time},
              {"cuisine", u.cuisine},
              {"cuisine_lexical", u.cuisine_lexical},
              {"cost", to_string(u.cost)},
              {"cost_paraphrase", u.cost_paraphrase},
              {"rating", to_json(u.rating)}};
}

Json to_json(const SystemBlock& s) {
  return Json{{"venue_name", s.venue_name},     {"location", to_json(s.location)},
              {"cuisine", s.cuisine},           {"cost", to_string(s.cost)},
              {"rating", s.rating},             {"opening_hours", to_json(s.opening_hours)}};
}

Json to_json(const Label& l) {
  if (l.is_correct()) return Json{{"kind", "correct"}};
  return Json{{"kind", "incorrect"}, {"error", to_string(l.error())}};
}

Json to_json(const Verdict& v) {
  Json out{{"decision", v.decision}, {"explanation", v.explanation}};
  if (v.confidence) out["confidence"] = *v.confidence;
  return out;
}

GeoPoint geo_point_from_json(const Json& j) {
  GeoPoint p{get_number(j, "lat"), get_number(j, "lon"), get_string(j, "district_label")};
  validate(p);
  return p;
}

OpeningHours opening_hours_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaViolation("opening_hours", "expected object");
  OpeningHours h;
  for (auto d : kWeekdays) {
    const std::string key(to_string(d));
    auto it = j.find(key);
    if (it == j.end()) throw SchemaViolation("opening_hours", "missing weekday " + key);
    if (!it->is_array()) throw SchemaViolation("opening_hours", key + ": expected array");
    for (const auto& iv : *it) {
      if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number_integer() || !iv[1].is_number_integer())
        throw SchemaViolation("opening_hours", key + ": interval must be [open, close]");
      h.on(d).push_back(OpenInterval{iv[0].get<int>(), iv[1].get<int>()});
    }
  }
  validate(h);
  return h;
}

UserBlock user_block_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaViolation("user", "expected object");
  UserBlock u;
  u.id = get_string(j, "id");
  u.utterance = get_string(j, "utterance");
  u.location = geo_point_from_json(require(j, "location"));
  auto date = Date::parse_iso(get_string(j, "date"));
  if (!date) throw SchemaViolation("date", "expected YYYY-MM-DD");
  u.date = *date;
  u.time = get_int(j, "time");
  u.cuisine = get_string(j, "cuisine");
  u.cuisine_lexical = get_string(j, "cuisine_lexical");
  u.cost = get_cost(j);
  u.cost_paraphrase = get_string(j, "cost_paraphrase");
  const auto& r = require(j, "rating");
  auto kind = rating_kind_from_string(get_string(r, "kind"));
  if (!kind) throw SchemaViolation("kind", "expected at_least|above|around");
  u.rating = RatingExpression{*kind, get_number(r, "value")};
  validate(u);
  return u;
}

SystemBlock system_block_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaViolation("system", "expected object");
  SystemBlock s;
  s.venue_name = get_string(j, "venue_name");
  s.location = geo_point_from_json(require(j, "location"));
  s.cuisine = get_string(j, "cuisine");
  s.cost = get_cost(j);
  s.rating = get_number(j, "rating");
  s.opening_hours = opening_hours_from_json(require(j, "opening_hours"));
  validate(s);
  return s;
}

Label label_from_json(const Json& j) {
  const auto kind = get_string(j, "kind");
  if (kind == "correct") return Label::correct();
  if (kind != "incorrect") throw SchemaViolation("kind", "expected correct|incorrect");
  auto e = error_from_string(get_string(j, "error"));
  if (!e) throw SchemaViolation("error", "unknown error category");
  return Label::incorrect(*e);
}

std::string serialize_pair(const LabeledPair& pair) {
  Json j{{"schema", kSchemaVersion},
         {"pair_id", pair.pair_id},
         {"user", to_json(pair.user)},
         {"system", to_json(pair.system)},
         {"label", to_json(pair.label)}};
  return j.dump();
}

LabeledPair deserialize_pair(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw MalformedJson(e.what());
  }
  if (!j.is_object()) throw SchemaViolation("pair", "expected a JSON object");
  if (get_string(j, "schema") != kSchemaVersion) throw SchemaViolation("schema", "unsupported version");
  LabeledPair p;
  p.pair_id = get_string(j, "pair_id");
  if (p.pair_id.empty()) throw SchemaViolation("pair_id", "empty");
  p.user = user_block_from_json(require(j, "user"));
  p.system = system_block_from_json(require(j, "system"));
  p.label = label_from_json(require(j, "label"));
  return p;
}

void write_dataset(const std::filesystem::path& path, const std::vector<LabeledPair>& pairs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  for (const auto& p : pairs) out << serialize_pair(p) << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

std::vector<LabeledPair> read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<LabeledPair> pairs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      pairs.push_back(deserialize_pair(line));
    } catch (const SchemaViolation& e) {
      throw SchemaViolation(e.field(), "line " + std::to_string(lineno) + ": " + e.reason());
    } catch (const MalformedJson& e) {
      throw MalformedJson("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!seen.insert(pairs.back().pair_id).second)
      throw SchemaViolation("pair_id", "line " + std::to_string(lineno) + ": duplicate " + pairs.back().pair_id);
  }
  return pairs;
}

}  // namespace judgebench
