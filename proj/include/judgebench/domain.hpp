#pragma once

// Shared data vocabulary: user blocks, system blocks, labels and verdicts.
// All types are plain values; they are validated at the boundaries
// (construction helpers and deserialization), not on every access.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace judgebench {

/// Minutes since local midnight, in [0, 1440].
using Minutes = int;

inline constexpr Minutes kMinutesPerDay = 1440;

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
  std::string district_label;

  bool operator==(const GeoPoint&) const = default;
};

enum class CostCategory { Low, Medium, High };

enum class RatingKind { AtLeast, Above, Around };

struct RatingExpression {
  RatingKind kind = RatingKind::AtLeast;
  double value = 0.0;

  bool operator==(const RatingExpression&) const = default;
};

enum class Weekday { Mon = 0, Tue, Wed, Thu, Fri, Sat, Sun };

inline constexpr std::array<Weekday, 7> kWeekdays = {Weekday::Mon, Weekday::Tue, Weekday::Wed, Weekday::Thu,
                                                     Weekday::Fri, Weekday::Sat, Weekday::Sun};

/// Gregorian calendar date.
struct Date {
  int year = 2024;
  int month = 1;
  int day = 1;

  auto operator<=>(const Date&) const = default;

  bool valid() const noexcept;
  Weekday weekday() const noexcept;
  /// Days since 1970-01-01.
  std::int64_t days_since_epoch() const noexcept;
  static Date from_days_since_epoch(std::int64_t days) noexcept;
  /// ISO 8601, "2024-03-11".
  std::string iso() const;
  static std::optional<Date> parse_iso(std::string_view text);
};

/// Half-open opening interval [open, close).
struct OpenInterval {
  Minutes open = 0;
  Minutes close = 0;

  bool operator==(const OpenInterval&) const = default;
  bool contains(Minutes t) const noexcept { return open <= t && t < close; }
};

struct OpeningHours {
  std::array<std::vector<OpenInterval>, 7> days;

  bool operator==(const OpeningHours&) const = default;

  std::vector<OpenInterval>& on(Weekday d) { return days[static_cast<std::size_t>(d)]; }
  const std::vector<OpenInterval>& on(Weekday d) const { return days[static_cast<std::size_t>(d)]; }

  /// Same intervals on every weekday.
  static OpeningHours every_day(std::vector<OpenInterval> intervals);
};

struct UserBlock {
  std::string id;
  std::string utterance;
  GeoPoint location;
  Date date;
  Minutes time = 0;
  std::string cuisine;
  std::string cuisine_lexical;
  CostCategory cost = CostCategory::Medium;
  std::string cost_paraphrase;
  RatingExpression rating;

  bool operator==(const UserBlock&) const = default;
};

struct SystemBlock {
  std::string venue_name;
  GeoPoint location;
  std::string cuisine;
  CostCategory cost = CostCategory::Medium;
  double rating = 0.0;
  OpeningHours opening_hours;

  bool operator==(const SystemBlock&) const = default;
};

enum class ErrorCategory { Location, Time, Cuisine, Cost, Rating };

inline constexpr std::array<ErrorCategory, 5> kErrorCategories = {
    ErrorCategory::Location, ErrorCategory::Time, ErrorCategory::Cuisine, ErrorCategory::Cost,
    ErrorCategory::Rating};

/// Correct, or Incorrect carrying exactly one error category.
class Label {
 public:
  static Label correct() { return Label{}; }
  static Label incorrect(ErrorCategory c) { return Label{c}; }

  bool is_correct() const noexcept { return !error_.has_value(); }
  /// Only meaningful when !is_correct().
  ErrorCategory error() const { return error_.value(); }
  const std::optional<ErrorCategory>& error_opt() const noexcept { return error_; }

  bool operator==(const Label&) const = default;

 private:
  Label() = default;
  explicit Label(ErrorCategory c) : error_(c) {}
  std::optional<ErrorCategory> error_;
};

struct LabeledPair {
  std::string pair_id;
  UserBlock user;
  SystemBlock system;
  Label label = Label::correct();

  bool operator==(const LabeledPair&) const = default;
};

struct Verdict {
  bool decision = false;  ///< true = recommendation aligned with the request
  std::string explanation;
  std::optional<double> confidence;

  bool operator==(const Verdict&) const = default;
};

/// The six evaluation buckets: Positive plus one per error category.
enum class PairCategory { Positive, Location, Time, Cuisine, Cost, Rating };

inline constexpr std::array<PairCategory, 6> kPairCategories = {
    PairCategory::Positive, PairCategory::Location, PairCategory::Time,
    PairCategory::Cuisine,  PairCategory::Cost,     PairCategory::Rating};

PairCategory category_of(const Label& label) noexcept;

// Name tables. The lowercase names are the wire names used in JSON.
std::string_view to_string(CostCategory c) noexcept;
std::string_view to_string(RatingKind k) noexcept;
std::string_view to_string(ErrorCategory e) noexcept;
std::string_view to_string(PairCategory c) noexcept;
std::string_view to_string(Weekday d) noexcept;      ///< "mon".."sun"
std::string_view weekday_name(Weekday d) noexcept;   ///< "Monday".."Sunday"

std::optional<CostCategory> cost_from_string(std::string_view s) noexcept;
std::optional<RatingKind> rating_kind_from_string(std::string_view s) noexcept;
std::optional<ErrorCategory> error_from_string(std::string_view s) noexcept;
std::optional<PairCategory> pair_category_from_string(std::string_view s) noexcept;

/// "20:35" for 1235.
std::string format_clock(Minutes t);
std::optional<Minutes> parse_clock(std::string_view text);

/// "at least 4.5", "above 3.8", "around 4.0".
std::string rating_phrase(const RatingExpression& r);

/// True iff some interval of the date's weekday contains `time`.
bool is_open_at(const OpeningHours& hours, const Date& date, Minutes time);

// Invariant checks. Each throws SchemaViolation naming the first bad field.
void validate(const GeoPoint& p);
void validate(const OpeningHours& h);
void validate(const UserBlock& u);
void validate(const SystemBlock& s);

}  // namespace judgebench
