#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>

#include "judgebench/domain.hpp"

namespace judgebench {

/// Great-circle distance in kilometres (mean Earth radius 6371.0088 km).
double haversine_km(const GeoPoint& a, const GeoPoint& b) noexcept;

/// Driving-time estimate between two points, in minutes (>= 0).
/// Implementations must be safe to call concurrently.
class TravelTimeEstimator {
 public:
  virtual ~TravelTimeEstimator() = default;
  virtual double estimate(const GeoPoint& a, const GeoPoint& b) const = 0;
  virtual std::string describe() const = 0;
};

/// Distance over a constant speed. Pure and deterministic.
class HaversineEstimator final : public TravelTimeEstimator {
 public:
  static constexpr double kDefaultSpeedKmh = 30.0;

  explicit HaversineEstimator(double speed_kmh = kDefaultSpeedKmh);
  double estimate(const GeoPoint& a, const GeoPoint& b) const override;
  std::string describe() const override;
  double speed_kmh() const noexcept { return speed_kmh_; }

 private:
  double speed_kmh_;
};

struct RoutingApiConfig {
  /// Full URL, e.g. "https://routing.example.com/v1/duration".
  std::string endpoint;
  /// Opaque routing profile forwarded as the `profile` query parameter.
  std::string profile = "driving";
  /// Environment variable holding the bearer token; unset or empty means no auth header.
  std::string token_env = "JUDGEBENCH_ROUTING_TOKEN";
  double timeout_s = 10.0;
  bool fallback_on_error = true;
  double fallback_speed_kmh = HaversineEstimator::kDefaultSpeedKmh;
};

/// Client for a routing service.
///
/// Wire contract: GET <endpoint>?origin=<lat>,<lon>&destination=<lat>,<lon>&profile=<p>
/// with an optional "Authorization: Bearer <token>" header. The response is a JSON
/// object carrying the driving duration in seconds, either as a top-level
/// "duration" number or as "routes[0].duration" (Mapbox Directions shape).
///
/// Results are memoized for the lifetime of the instance. On failure the call
/// throws RoutingUnavailable, or falls back to a Haversine estimate when
/// `fallback_on_error` is set.
class RoutingApiEstimator final : public TravelTimeEstimator {
 public:
  explicit RoutingApiEstimator(RoutingApiConfig config);
  double estimate(const GeoPoint& a, const GeoPoint& b) const override;
  std::string describe() const override;

  /// Number of estimates served by the fallback so far.
  std::size_t fallback_count() const;

 private:
  double query(const GeoPoint& a, const GeoPoint& b) const;

  RoutingApiConfig config_;
  HaversineEstimator fallback_;
  mutable std::mutex mu_;
  mutable std::map<std::tuple<double, double, double, double>, double> cache_;
  mutable std::size_t fallbacks_ = 0;
};

/// Threshold above which a venue counts as too far away.
inline constexpr double kMaxTravelMinutes = 15.0;

}  // namespace judgebench
