#include "judgebench/domain.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "judgebench/errors.hpp"

namespace judgebench {

namespace {

// Howard Hinnant's days_from_civil / civil_from_days.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) noexcept {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool is_leap(int y) noexcept { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) noexcept {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

}  // namespace

bool Date::valid() const noexcept {
  return month >= 1 && month <= 12 && day >= 1 && day <= days_in_month(year, month);
}

std::int64_t Date::days_since_epoch() const noexcept {
  return days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
}

Date Date::from_days_since_epoch(std::int64_t z) noexcept {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

Weekday Date::weekday() const noexcept {
  // 1970-01-01 was a Thursday.
  const std::int64_t z = days_since_epoch();
  const std::int64_t from_monday = ((z % 7) + 7 + 3) % 7;
  return static_cast<Weekday>(from_monday);
}

std::string Date::iso() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

std::optional<Date> Date::parse_iso(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto num = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    int v = 0;
    auto sub = text.substr(pos, len);
    auto [ptr, ec] = std::from_chars(sub.data(), sub.data() + sub.size(), v);
    if (ec != std::errc{} || ptr != sub.data() + sub.size()) return std::nullopt;
    return v;
  };
  auto y = num(0, 4), m = num(5, 2), d = num(8, 2);
  if (!y || !m || !d) return std::nullopt;
  Date out{*y, *m, *d};
  if (!out.valid()) return std::nullopt;
  return out;
}

OpeningHours OpeningHours::every_day(std::vector<OpenInterval> intervals) {
  OpeningHours h;
  for (auto& d : h.days) d = intervals;
  return h;
}

PairCategory category_of(const Label& label) noexcept {
  if (label.is_correct()) return PairCategory::Positive;
  switch (label.error()) {
    case ErrorCategory::Location: return PairCategory::Location;
    case ErrorCategory::Time: return PairCategory::Time;
    case ErrorCategory::Cuisine: return PairCategory::Cuisine;
    case ErrorCategory::Cost: return PairCategory::Cost;
    case ErrorCategory::Rating: return PairCategory::Rating;
  }
  return PairCategory::Positive;
}

std::string_view to_string(CostCategory c) noexcept {
  switch (c) {
    case CostCategory::Low: return "low";
    case CostCategory::Medium: return "medium";
    case CostCategory::High: return "high";
  }
  return "?";
}

std::string_view to_string(RatingKind k) noexcept {
  switch (k) {
    case RatingKind::AtLeast: return "at_least";
    case RatingKind::Above: return "above";
    case RatingKind::Around: return "around";
  }
  return "?";
}

std::string_view to_string(ErrorCategory e) noexcept {
  switch (e) {
    case ErrorCategory::Location: return "location";
    case ErrorCategory::Time: return "time";
    case ErrorCategory::Cuisine: return "cuisine";
    case ErrorCategory::Cost: return "cost";
    case ErrorCategory::Rating: return "rating";
  }
  return "?";
}

std::string_view to_string(PairCategory c) noexcept {
  switch (c) {
    case PairCategory::Positive: return "positive";
    case PairCategory::Location: return "location";
    case PairCategory::Time: return "time";
    case PairCategory::Cuisine: return "cuisine";
    case PairCategory::Cost: return "cost";
    case PairCategory::Rating: return "rating";
  }
  return "?";
}

std::string_view to_string(Weekday d) noexcept {
  static constexpr std::string_view kNames[] = {"mon", "tue", "wed", "thu", "fri", "sat", "sun"};
  return kNames[static_cast<int>(d)];
}

std::string_view weekday_name(Weekday d) noexcept {
  static constexpr std::string_view kNames[] = {"Monday", "Tuesday",  "Wednesday", "Thursday",
                                                "Friday", "Saturday", "Sunday"};
  return kNames[static_cast<int>(d)];
}

std::optional<CostCategory> cost_from_string(std::string_view s) noexcept {
  for (auto c : {CostCategory::Low, CostCategory::Medium, CostCategory::High})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

std::optional<RatingKind> rating_kind_from_string(std::string_view s) noexcept {
  for (auto k : {RatingKind::AtLeast, RatingKind::Above, RatingKind::Around})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

std::optional<ErrorCategory> error_from_string(std::string_view s) noexcept {
  for (auto e : kErrorCategories)
    if (to_string(e) == s) return e;
  return std::nullopt;
}

std::optional<PairCategory> pair_category_from_string(std::string_view s) noexcept {
  for (auto c : kPairCategories)
    if (to_string(c) == s) return c;
  return std::nullopt;
}

std::string format_clock(Minutes t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02d:%02d", t / 60, t % 60);
  return buf;
}

std::optional<Minutes> parse_clock(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  int h = 0, m = 0;
  auto hs = text.substr(0, colon), ms = text.substr(colon + 1);
  if (std::from_chars(hs.data(), hs.data() + hs.size(), h).ec != std::errc{}) return std::nullopt;
  if (std::from_chars(ms.data(), ms.data() + ms.size(), m).ec != std::errc{}) return std::nullopt;
  if (h < 0 || h > 24 || m < 0 || m > 59 || (h == 24 && m != 0)) return std::nullopt;
  return h * 60 + m;
}

std::string rating_phrase(const RatingExpression& r) {
  char buf[32];
  const char* word = r.kind == RatingKind::AtLeast ? "at least" : r.kind == RatingKind::Above ? "above" : "around";
  std::snprintf(buf, sizeof buf, "%s %.1f", word, r.value);
  return buf;
}

bool is_open_at(const OpeningHours& hours, const Date& date, Minutes time) {
  const auto& day = hours.on(date.weekday());
  return std::any_of(day.begin(), day.end(), [time](const OpenInterval& iv) { return iv.contains(time); });
}

void validate(const GeoPoint& p) {
  if (!std::isfinite(p.lat) || p.lat < -90.0 || p.lat > 90.0) throw SchemaViolation("lat", "out of range");
  if (!std::isfinite(p.lon) || p.lon < -180.0 || p.lon > 180.0) throw SchemaViolation("lon", "out of range");
  if (p.district_label.empty()) throw SchemaViolation("district_label", "empty");
}

void validate(const OpeningHours& h) {
  for (auto d : kWeekdays) {
    Minutes prev_close = -1;
    for (const auto& iv : h.on(d)) {
      if (iv.open < 0 || iv.close > kMinutesPerDay || iv.open >= iv.close)
        throw SchemaViolation("opening_hours", std::string(to_string(d)) + ": interval out of range");
      if (iv.open < prev_close)
        throw SchemaViolation("opening_hours", std::string(to_string(d)) + ": intervals overlap or unsorted");
      prev_close = iv.close;
    }
  }
}

namespace {
void validate_rating(double r, const char* field) {
  if (!std::isfinite(r) || r < 0.0 || r > 5.0) throw SchemaViolation(field, "out of range");
}
}  // namespace

void validate(const UserBlock& u) {
  if (u.id.empty()) throw SchemaViolation("id", "empty");
  if (u.utterance.empty()) throw SchemaViolation("utterance", "empty");
  validate(u.location);
  if (!u.date.valid() || u.date.year != 2024) throw SchemaViolation("date", "outside calendar year 2024");
  if (u.time < 8 * 60 || u.time > 22 * 60) throw SchemaViolation("time", "outside 08:00-22:00");
  if (u.cuisine.empty()) throw SchemaViolation("cuisine", "empty");
  if (u.cuisine_lexical.empty()) throw SchemaViolation("cuisine_lexical", "empty");
  if (u.cost_paraphrase.empty()) throw SchemaViolation("cost_paraphrase", "empty");
  validate_rating(u.rating.value, "rating.value");
}

void validate(const SystemBlock& s) {
  if (s.venue_name.empty()) throw SchemaViolation("venue_name", "empty");
  validate(s.location);
  if (s.cuisine.empty()) throw SchemaViolation("cuisine", "empty");
  validate_rating(s.rating, "rating");
  validate(s.opening_hours);
}

}  // namespace judgebench
