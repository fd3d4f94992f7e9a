#pragma once

// Rule-based ground-truth judge. A recommendation is wrong in a dimension when
//   location: estimated drive > 15 minutes
//   time:     venue closed at the requested date/time
//   cuisine:  canonical cuisine id differs
//   cost:     cost category differs
//   rating:   "around v" and |rating - v| > 0.2, or "at least/above v" and rating < v

#include <set>
#include <string>

#include "judgebench/domain.hpp"
#include "judgebench/travel_time.hpp"

namespace judgebench {

struct OracleVerdict {
  bool correct = true;
  std::set<ErrorCategory> violations;

  bool operator==(const OracleVerdict&) const = default;
};

/// Absolute width of the accepted band for "around" ratings.
inline constexpr double kAroundTolerance = 0.2;

/// Ratings are compared with this slack so that one-decimal values such as
/// 4.2 - 4.0 do not trip the 0.2 band through binary rounding.
inline constexpr double kRatingEpsilon = 1e-9;

bool rating_satisfies(const RatingExpression& wanted, double rating) noexcept;

/// Throws RoutingUnavailable when the estimator cannot answer.
OracleVerdict judge_pair(const UserBlock& user, const SystemBlock& system, const TravelTimeEstimator& travel);

/// Human-readable, one line per dimension ("Location: CORRECT (4.9 min drive)").
std::string explain_pair(const UserBlock& user, const SystemBlock& system, const TravelTimeEstimator& travel);

}  // namespace judgebench
