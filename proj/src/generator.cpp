#include "judgebench/generator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>

#include "judgebench/errors.hpp"
#include "judgebench/oracle.hpp"
#include "judgebench/parallel.hpp"
#include "judgebench/serialization.hpp"
#include "pools_data.hpp"

namespace judgebench {

// ---------------------------------------------------------------------------
// Rng

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

Rng Rng::derive(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return Rng(splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index));
}

std::size_t Rng::index(std::size_t n) {
  const std::uint64_t bound = n;
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = next();
    if (x >= threshold) return static_cast<std::size_t>(x % bound);
  }
}

std::int64_t Rng::between(std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(index(static_cast<std::size_t>(hi - lo + 1)));
}

double Rng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

// ---------------------------------------------------------------------------
// Config

namespace {

std::vector<std::string> string_list(const nlohmann::json& j, const char* key) {
  if (!j.is_array()) throw ConfigError(std::string(key) + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw ConfigError(std::string(key) + " must be an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

void overlay(GeneratorConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("generator config must be a JSON object");
  try {
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("n_user_blocks")) c.n_user_blocks = j["n_user_blocks"].get<std::size_t>();
    if (j.contains("version")) c.pools_version = j["version"].get<std::string>();
    if (j.contains("locations")) {
      c.locations.clear();
      for (const auto& p : j["locations"]) c.locations.push_back(geo_point_from_json(Json(p)));
    }
    if (j.contains("cuisines")) {
      c.cuisines.clear();
      for (const auto& e : j["cuisines"])
        c.cuisines.push_back(CuisineEntry{e.at("id").get<std::string>(), string_list(e.at("variants"), "variants"),
                                          string_list(e.at("venue_words"), "venue_words")});
    }
    if (j.contains("cost_paraphrases")) {
      c.cost_paraphrases.clear();
      for (const auto& [level, list] : j["cost_paraphrases"].items()) {
        auto cat = cost_from_string(level);
        if (!cat) throw ConfigError("unknown cost level '" + level + "'");
        c.cost_paraphrases[*cat] = string_list(list, "cost_paraphrases");
      }
    }
    if (j.contains("rating_phrases")) {
      c.rating_phrases.clear();
      for (const auto& r : j["rating_phrases"]) {
        auto kind = rating_kind_from_string(r.at("kind").get<std::string>());
        if (!kind) throw ConfigError("unknown rating kind in rating_phrases");
        c.rating_phrases.push_back(RatingExpression{*kind, r.at("value").get<double>()});
      }
    }
    if (j.contains("utterance_frames")) c.utterance_frames = string_list(j["utterance_frames"], "utterance_frames");
    if (j.contains("venue_suffixes")) c.venue_suffixes = string_list(j["venue_suffixes"], "venue_suffixes");
    auto date = [&](const char* key, Date& out) {
      if (!j.contains(key)) return;
      auto d = Date::parse_iso(j[key].get<std::string>());
      if (!d) throw ConfigError(std::string(key) + " must be YYYY-MM-DD");
      out = *d;
    };
    date("first_date", c.first_date);
    date("last_date", c.last_date);
    auto clock = [&](const char* key, Minutes& out) {
      if (!j.contains(key)) return;
      auto t = parse_clock(j[key].get<std::string>());
      if (!t) throw ConfigError(std::string(key) + " must be HH:MM");
      out = *t;
    };
    clock("earliest_time", c.earliest_time);
    clock("latest_time", c.latest_time);
    if (j.contains("low_cost_max_rating")) c.low_cost_max_rating = j["low_cost_max_rating"].get<double>();
    if (j.contains("location_retry_budget")) c.location_retry_budget = j["location_retry_budget"].get<int>();
    if (j.contains("model_retry_budget")) c.model_retry_budget = j["model_retry_budget"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("generator config: ") + e.what());
  } catch (const SchemaViolation& e) {
    throw ConfigError(std::string("generator config: ") + e.what());
  }
}

}  // namespace

GeneratorConfig GeneratorConfig::defaults() {
  GeneratorConfig c;
  overlay(c, nlohmann::json::parse(detail::kPoolsJson));
  return c;
}

GeneratorConfig GeneratorConfig::from_json(const nlohmann::json& overrides) {
  auto c = defaults();
  overlay(c, overrides);
  c.validate();
  return c;
}

GeneratorConfig GeneratorConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open generator config " + path.string());
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("generator config is not valid JSON: " + path.string());
  return from_json(j);
}

void GeneratorConfig::validate() const {
  if (n_user_blocks == 0) throw ConfigError("n_user_blocks must be >= 1");
  if (locations.empty()) throw ConfigError("at least one location is required");
  if (cuisines.size() < 2) throw ConfigError("at least two cuisines are required");
  for (const auto& c : cuisines)
    if (c.variants.empty() || c.venue_words.empty()) throw ConfigError("cuisine " + c.id + " lacks variants or venue words");
  for (auto level : {CostCategory::Low, CostCategory::Medium, CostCategory::High}) {
    auto it = cost_paraphrases.find(level);
    if (it == cost_paraphrases.end() || it->second.empty())
      throw ConfigError("no paraphrases for cost level " + std::string(to_string(level)));
    if (rating_phrases_for(level).empty())
      throw ConfigError("no rating phrase allowed for cost level " + std::string(to_string(level)));
  }
  for (const auto& r : rating_phrases)
    if (!(r.value > 3.5) || r.value > 5.0) throw ConfigError("rating phrases must have values in (3.5, 5.0]");
  if (utterance_frames.empty()) throw ConfigError("at least one utterance frame is required");
  if (venue_suffixes.empty()) throw ConfigError("at least one venue suffix is required");
  if (!first_date.valid() || !last_date.valid() || last_date < first_date || first_date.year != 2024 ||
      last_date.year != 2024)
    throw ConfigError("date range must lie within 2024");
  if (earliest_time < 8 * 60 || latest_time > 22 * 60 || earliest_time > latest_time)
    throw ConfigError("time range must lie within 08:00-22:00");
  if (location_retry_budget < 1 || model_retry_budget < 1) throw ConfigError("retry budgets must be >= 1");
  if (!(near_min_km >= 0 && near_min_km <= near_max_km && far_min_km <= far_max_km))
    throw ConfigError("invalid placement radii");
}

const CuisineEntry& GeneratorConfig::cuisine(const std::string& id) const {
  for (const auto& c : cuisines)
    if (c.id == id) return c;
  throw ConfigError("unknown cuisine " + id);
}

std::optional<CostCategory> GeneratorConfig::cost_of_paraphrase(const std::string& paraphrase) const {
  for (const auto& [level, list] : cost_paraphrases)
    if (std::find(list.begin(), list.end(), paraphrase) != list.end()) return level;
  return std::nullopt;
}

std::vector<RatingExpression> GeneratorConfig::rating_phrases_for(CostCategory cost) const {
  std::vector<RatingExpression> out;
  for (const auto& r : rating_phrases)
    if (cost != CostCategory::Low || r.value <= low_cost_max_rating + 1e-9) out.push_back(r);
  return out;
}

UtteranceBackend UtteranceBackend::model_backend(ChatProvider& provider, CallOptions call) {
  UtteranceBackend b;
  b.kind = BackendKind::Model;
  b.provider = &provider;
  b.call = std::move(call);
  return b;
}

// ---------------------------------------------------------------------------
// Helpers

namespace {

// Random streams, one per purpose, so adding draws to one does not shift another.
enum Stream : std::uint64_t { kUserStream = 1, kPositiveStream = 2, kErrorStream = 3, kIdStream = 4 };

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double round_to(double v, double step) { return std::round(v / step) * step; }

double tenths(int t) { return t / 10.0; }
int to_tenths(double v) { return static_cast<int>(std::lround(v * 10.0)); }

/// Point `km` away from `origin` along `bearing` (radians), equirectangular
/// approximation, rounded to 5 decimals (about 1 m).
GeoPoint offset(const GeoPoint& origin, double km, double bearing, std::string label) {
  constexpr double kKmPerDegLat = 111.32;
  const double dlat = km * std::cos(bearing) / kKmPerDegLat;
  const double dlon = km * std::sin(bearing) / (kKmPerDegLat * std::cos(origin.lat * std::numbers::pi / 180.0));
  return GeoPoint{round_to(origin.lat + dlat, 1e-5), round_to(origin.lon + dlon, 1e-5), std::move(label)};
}

std::string city_of(const std::string& district_label) {
  const auto comma = district_label.rfind(", ");
  return comma == std::string::npos ? district_label : district_label.substr(comma + 2);
}

std::string chat_text(const UtteranceBackend& backend, const std::string& system, const std::string& user,
                      std::size_t index) {
  ChatRequest req;
  req.model_id = backend.provider->model_id();
  req.messages = {{Role::System, system}, {Role::User, user}};
  try {
    return complete(*backend.provider, req, backend.call).content;
  } catch (const ProviderError& e) {
    throw BackendFailure(index, e.what());
  }
}

/// First {...} span of a model answer, parsed as a storage-format system block.
std::optional<SystemBlock> parse_model_block(const std::string& content) {
  const auto open = content.find('{');
  const auto close = content.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open) return std::nullopt;
  auto j = Json::parse(content.substr(open, close - open + 1), nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  try {
    return system_block_from_json(j);
  } catch (const SchemaViolation&) {
    return std::nullopt;
  }
}

const char* kVenueSchemaHint =
    "Answer with one JSON object only, shaped like "
    "{\"venue_name\": str, \"location\": {\"lat\": num, \"lon\": num, \"district_label\": str}, "
    "\"cuisine\": str, \"cost\": \"low\"|\"medium\"|\"high\", \"rating\": num, "
    "\"opening_hours\": {\"mon\": [[open_minute, close_minute], ...], ..., \"sun\": [...]}} "
    "where minutes count from midnight and no interval crosses midnight.";

std::string describe_request(const UserBlock& user) {
  return "User request: \"" + user.utterance + "\". Location: " + user.location.district_label + " (" +
         std::to_string(user.location.lat) + ", " + std::to_string(user.location.lon) + "). Date: " +
         user.date.iso() + " (" + std::string(weekday_name(user.date.weekday())) + "), time " + format_clock(user.time) +
         ". Wanted cuisine: " + user.cuisine + "; cost level: " + std::string(to_string(user.cost)) +
         "; rating " + rating_phrase(user.rating) + ".";
}

OpeningHours aligned_hours(Rng& rng, const UserBlock& user) {
  std::vector<Minutes> opens, closes;
  for (Minutes m = 6 * 60; m <= 12 * 60; m += 30)
    if (m <= user.time) opens.push_back(m);
  for (Minutes m = 21 * 60; m <= kMinutesPerDay; m += 30)
    if (m > user.time) closes.push_back(m);
  const OpenInterval iv{rng.pick(opens), rng.pick(closes)};
  auto hours = OpeningHours::every_day({iv});
  // Half of the venues have a weekly rest day, never on the requested weekday.
  if (rng.chance(0.5)) {
    auto rest = kWeekdays[rng.index(7)];
    if (rest != user.date.weekday()) hours.on(rest).clear();
  }
  return hours;
}

double aligned_rating(Rng& rng, const RatingExpression& want) {
  const int v = to_tenths(want.value);
  int t = v;
  switch (want.kind) {
    case RatingKind::AtLeast: t = static_cast<int>(rng.between(v, std::min(v + 4, 50))); break;
    case RatingKind::Above: t = static_cast<int>(rng.between(std::min(v + 1, 50), std::min(v + 5, 50))); break;
    case RatingKind::Around:
      t = static_cast<int>(rng.between(std::max(v - 2, 0), std::min(v + 2, 50)));
      break;
  }
  return tenths(t);
}

double violating_rating(Rng& rng, const RatingExpression& want) {
  const int v = to_tenths(want.value);
  if (want.kind != RatingKind::Around) return tenths(std::max(0, v - static_cast<int>(rng.between(1, 8))));
  const int delta = static_cast<int>(rng.between(3, 8));
  const bool can_up = v + delta <= 50, can_down = v - delta >= 0;
  const bool up = can_up && (!can_down || rng.chance(0.5));
  return tenths(up ? v + delta : v - delta);
}

OpeningHours violating_hours(Rng& rng, const UserBlock& user, const OpeningHours& base) {
  auto hours = base;
  auto& day = hours.on(user.date.weekday());
  const Minutes t = user.time;
  // Candidate edits of the requested weekday: close before t, open after t, or rest day.
  std::vector<int> options{2};
  const auto it = std::find_if(day.begin(), day.end(), [t](const OpenInterval& iv) { return iv.contains(t); });
  if (it != day.end()) {
    if ((t / 60) * 60 > it->open) options.push_back(0);
    if (((t / 60) + 1) * 60 + 60 <= it->close) options.push_back(1);
  }
  switch (rng.pick(options)) {
    case 0: it->close = (t / 60) * 60; break;
    case 1: it->open = ((t / 60) + 1) * 60; break;
    default: day.clear(); break;
  }
  return hours;
}

UserBlock make_user(const GeneratorConfig& config, const UtteranceBackend& backend, std::size_t i) {
  auto rng = Rng::derive(config.seed, kUserStream, i);
  UserBlock u;
  char id[16];
  std::snprintf(id, sizeof id, "u%03zu", i + 1);
  u.id = id;
  u.location = rng.pick(config.locations);
  const auto first = config.first_date.days_since_epoch();
  u.date = Date::from_days_since_epoch(rng.between(first, config.last_date.days_since_epoch()));
  u.time = static_cast<Minutes>(rng.between(config.earliest_time, config.latest_time));
  const auto& cuisine = rng.pick(config.cuisines);
  u.cuisine = cuisine.id;
  u.cuisine_lexical = rng.pick(cuisine.variants);
  u.cost = static_cast<CostCategory>(rng.index(3));
  u.cost_paraphrase = rng.pick(config.cost_paraphrases.at(u.cost));
  u.rating = rng.pick(config.rating_phrases_for(u.cost));

  const auto rating = rating_phrase(u.rating);
  if (backend.kind == BackendKind::Template) {
    const auto& frame = config.utterance_frames[(config.seed + i) % config.utterance_frames.size()];
    u.utterance = fill_frame(frame, u.cuisine_lexical, u.cost_paraphrase, rating);
    return u;
  }
  const std::string ask = "Write one short spoken request a driver might give an in-car assistant when looking "
                          "for a restaurant. It must contain these exact phrases: \"" +
                          u.cuisine_lexical + "\", \"" + u.cost_paraphrase + "\" and \"" + rating +
                          "\". Reply with the request text only.";
  for (int attempt = 0; attempt < config.model_retry_budget; ++attempt) {
    auto text = chat_text(backend, "You write natural in-car voice requests.", ask, i);
    const auto l = lower(text);
    if (l.find(lower(u.cuisine_lexical)) != std::string::npos && l.find(lower(u.cost_paraphrase)) != std::string::npos &&
        l.find(lower(rating)) != std::string::npos) {
      u.utterance = std::move(text);
      return u;
    }
  }
  throw BackendFailure(i, "utterance omitted a required phrase after " + std::to_string(config.model_retry_budget) +
                              " attempts");
}

}  // namespace

std::string fill_frame(const std::string& frame, const std::string& cuisine, const std::string& cost,
                       const std::string& rating) {
  std::string out = frame;
  auto replace = [&out](std::string_view slot, const std::string& value) {
    for (auto pos = out.find(slot); pos != std::string::npos; pos = out.find(slot, pos + value.size()))
      out.replace(pos, slot.size(), value);
  };
  replace("{cuisine}", cuisine);
  replace("{cost}", cost);
  replace("{rating}", rating);
  return out;
}

std::vector<UserBlock> generate_user_blocks(const GeneratorConfig& config, const UtteranceBackend& backend) {
  config.validate();
  if (backend.kind == BackendKind::Model && !backend.provider) throw ConfigError("model backend needs a provider");
  std::vector<UserBlock> out;
  out.reserve(config.n_user_blocks);
  for (std::size_t i = 0; i < config.n_user_blocks; ++i) out.push_back(make_user(config, backend, i));
  return out;
}

SystemBlock generate_positive_case(const GeneratorConfig& config, const UserBlock& user,
                                   const UtteranceBackend& backend, const TravelTimeEstimator& travel,
                                   std::size_t index) {
  if (backend.kind == BackendKind::Model) {
    if (!backend.provider) throw ConfigError("model backend needs a provider");
    const std::string ask = describe_request(user) +
                            " Recommend one restaurant that satisfies every constraint: same cuisine, same cost "
                            "level, a rating meeting the request, open at the requested day and time, and at most "
                            "15 minutes' drive away. " +
                            kVenueSchemaHint;
    for (int attempt = 0; attempt < config.model_retry_budget; ++attempt) {
      auto block = parse_model_block(chat_text(backend, "You recommend restaurants as structured data.", ask, index));
      if (block && judge_pair(user, *block, travel).correct) return *block;
    }
    throw AlignmentFailure("no aligned recommendation for " + user.id + " after " +
                           std::to_string(config.model_retry_budget) + " attempts");
  }

  auto rng = Rng::derive(config.seed, kPositiveStream, index);
  const auto& cuisine = config.cuisine(user.cuisine);
  SystemBlock s;
  s.venue_name = rng.pick(cuisine.venue_words) + " " + rng.pick(config.venue_suffixes);
  s.cuisine = user.cuisine;
  s.cost = user.cost;
  s.rating = aligned_rating(rng, user.rating);
  s.opening_hours = aligned_hours(rng, user);
  for (int attempt = 0; attempt < config.location_retry_budget; ++attempt) {
    s.location = offset(user.location, rng.uniform(config.near_min_km, config.near_max_km),
                        rng.uniform(0.0, 2.0 * std::numbers::pi), user.location.district_label);
    if (travel.estimate(user.location, s.location) <= kMaxTravelMinutes) return s;
  }
  throw AlignmentFailure("no venue within the drive limit for " + user.id);
}

SystemBlock restore_dimension(const SystemBlock& broken, const SystemBlock& base, ErrorCategory c) {
  auto out = broken;
  switch (c) {
    case ErrorCategory::Location: out.location = base.location; break;
    case ErrorCategory::Time: out.opening_hours = base.opening_hours; break;
    case ErrorCategory::Cuisine: out.cuisine = base.cuisine; break;
    case ErrorCategory::Cost: out.cost = base.cost; break;
    case ErrorCategory::Rating: out.rating = base.rating; break;
  }
  return out;
}

namespace {

bool violates_only(const UserBlock& user, const SystemBlock& block, ErrorCategory error,
                   const TravelTimeEstimator& travel) {
  const auto v = judge_pair(user, block, travel);
  return v.violations == std::set<ErrorCategory>{error};
}

SystemBlock model_error_case(const GeneratorConfig& config, const UserBlock& user, const SystemBlock& base,
                             ErrorCategory error, const UtteranceBackend& backend, const TravelTimeEstimator& travel,
                             std::size_t index) {
  const std::string ask = describe_request(user) + " Here is a suitable recommendation: " + to_json(base).dump() +
                          ". Produce a copy of it that is wrong only in its " + std::string(to_string(error)) +
                          (error == ErrorCategory::Location ? " (more than 15 minutes' drive away)" : "") +
                          " and keep every other field identical. " + kVenueSchemaHint;
  const int budget = error == ErrorCategory::Location ? config.location_retry_budget : config.model_retry_budget;
  for (int attempt = 0; attempt < budget; ++attempt) {
    auto answer = parse_model_block(chat_text(backend, "You edit restaurant records.", ask, index));
    if (!answer) continue;
    // Everything but the error dimension is taken from the base block.
    auto block = restore_dimension(base, *answer, error);
    if (violates_only(user, block, error, travel)) return block;
  }
  if (error == ErrorCategory::Location)
    throw ExhaustedRetries("location error for " + user.id + " stayed within 15 minutes after " +
                           std::to_string(budget) + " attempts");
  throw AlignmentFailure(std::string(to_string(error)) + " error for " + user.id + " not isolated after " +
                         std::to_string(budget) + " attempts");
}

}  // namespace

SystemBlock generate_error_case(const GeneratorConfig& config, const UserBlock& user, const SystemBlock& base,
                                ErrorCategory error, const UtteranceBackend& backend,
                                const TravelTimeEstimator& travel, std::size_t index) {
  if (backend.kind == BackendKind::Model) {
    if (!backend.provider) throw ConfigError("model backend needs a provider");
    return model_error_case(config, user, base, error, backend, travel, index);
  }

  auto rng = Rng::derive(config.seed, kErrorStream, index * 8 + static_cast<std::size_t>(error));
  auto block = base;
  switch (error) {
    case ErrorCategory::Location: {
      const std::string label = "Outskirts of " + city_of(user.location.district_label);
      for (int attempt = 0; attempt < config.location_retry_budget; ++attempt) {
        block.location = offset(user.location, rng.uniform(config.far_min_km, config.far_max_km),
                                rng.uniform(0.0, 2.0 * std::numbers::pi), label);
        if (travel.estimate(user.location, block.location) > kMaxTravelMinutes) return block;
      }
      throw ExhaustedRetries("location error for " + user.id + " stayed within 15 minutes after " +
                             std::to_string(config.location_retry_budget) + " attempts");
    }
    case ErrorCategory::Time: block.opening_hours = violating_hours(rng, user, base.opening_hours); break;
    case ErrorCategory::Cuisine: {
      std::vector<std::string> others;
      for (const auto& c : config.cuisines)
        if (c.id != base.cuisine) others.push_back(c.id);
      block.cuisine = rng.pick(others);
      break;
    }
    case ErrorCategory::Cost: {
      std::vector<CostCategory> others;
      for (auto c : {CostCategory::Low, CostCategory::Medium, CostCategory::High})
        if (c != base.cost) others.push_back(c);
      block.cost = rng.pick(others);
      break;
    }
    case ErrorCategory::Rating: block.rating = violating_rating(rng, user.rating); break;
  }
  return block;
}

std::vector<LabeledPair> assemble_dataset(const GeneratorConfig& config, const UtteranceBackend& backend,
                                          const TravelTimeEstimator& travel, int workers) {
  const auto users = generate_user_blocks(config, backend);
  std::vector<std::array<LabeledPair, 6>> per_user(users.size());

  parallel_for(users.size(), workers, [&](std::size_t i) {
    const auto& user = users[i];
    const auto base = generate_positive_case(config, user, backend, travel, i);
    std::array<LabeledPair, 6> six;
    six[0] = LabeledPair{"", user, base, Label::correct()};
    for (std::size_t e = 0; e < kErrorCategories.size(); ++e) {
      const auto c = kErrorCategories[e];
      six[e + 1] = LabeledPair{"", user, generate_error_case(config, user, base, c, backend, travel, i),
                               Label::incorrect(c)};
    }
    // Letters are handed out in a seeded order so the id does not give away the label.
    std::array<char, 6> letters{'a', 'b', 'c', 'd', 'e', 'f'};
    auto rng = Rng::derive(config.seed, kIdStream, i);
    for (std::size_t k = letters.size() - 1; k > 0; --k) std::swap(letters[k], letters[rng.index(k + 1)]);
    for (std::size_t k = 0; k < six.size(); ++k) six[k].pair_id = user.id + "-" + letters[k];
    std::sort(six.begin(), six.end(), [](const auto& a, const auto& b) { return a.pair_id < b.pair_id; });
    per_user[i] = std::move(six);
  });

  std::vector<LabeledPair> out;
  out.reserve(users.size() * 6);
  for (auto& six : per_user)
    for (auto& p : six) out.push_back(std::move(p));
  return out;
}

}  // namespace judgebench
