#include "judgebench/oracle.hpp"

#include <cmath>
#include <cstdio>

namespace judgebench {

bool rating_satisfies(const RatingExpression& wanted, double rating) noexcept {
  if (wanted.kind == RatingKind::Around) return std::abs(rating - wanted.value) <= kAroundTolerance + kRatingEpsilon;
  return rating >= wanted.value - kRatingEpsilon;
}

OracleVerdict judge_pair(const UserBlock& user, const SystemBlock& system, const TravelTimeEstimator& travel) {
  OracleVerdict v;
  if (travel.estimate(user.location, system.location) > kMaxTravelMinutes) v.violations.insert(ErrorCategory::Location);
  if (!is_open_at(system.opening_hours, user.date, user.time)) v.violations.insert(ErrorCategory::Time);
  if (system.cuisine != user.cuisine) v.violations.insert(ErrorCategory::Cuisine);
  if (system.cost != user.cost) v.violations.insert(ErrorCategory::Cost);
  if (!rating_satisfies(user.rating, system.rating)) v.violations.insert(ErrorCategory::Rating);
  v.correct = v.violations.empty();
  return v;
}

std::string explain_pair(const UserBlock& user, const SystemBlock& system, const TravelTimeEstimator& travel) {
  const auto verdict = judge_pair(user, system, travel);
  auto mark = [&](ErrorCategory c) { return verdict.violations.count(c) ? "INCORRECT" : "CORRECT"; };
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "Location: %s (about %.1f min drive, limit 15 min).\n", mark(ErrorCategory::Location),
                travel.estimate(user.location, system.location));
  out += buf;
  out += "Time: " + std::string(mark(ErrorCategory::Time)) + " (requested " +
         std::string(weekday_name(user.date.weekday())) + " " + format_clock(user.time) + ").\n";
  out += "Cuisine: " + std::string(mark(ErrorCategory::Cuisine)) + " (requested " + user.cuisine + ", venue serves " +
         system.cuisine + ").\n";
  out += "Cost: " + std::string(mark(ErrorCategory::Cost)) + " (requested " + std::string(to_string(user.cost)) +
         ", venue is " + std::string(to_string(system.cost)) + ").\n";
  std::snprintf(buf, sizeof buf, "Rating: %s (requested %s, venue has %.1f).", mark(ErrorCategory::Rating),
                rating_phrase(user.rating).c_str(), system.rating);
  out += buf;
  return out;
}

}  // namespace judgebench
