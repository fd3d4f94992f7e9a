#include "judgebench/travel_time.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "http_client.hpp"
#include "judgebench/errors.hpp"

namespace judgebench {

namespace {
constexpr double kEarthRadiusKm = 6371.0088;

double to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

std::string coord(const GeoPoint& p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f,%.6f", p.lat, p.lon);
  return buf;
}
}  // namespace

double haversine_km(const GeoPoint& a, const GeoPoint& b) noexcept {
  const double dlat = to_rad(b.lat - a.lat);
  const double dlon = to_rad(b.lon - a.lon);
  const double s = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(to_rad(a.lat)) * std::cos(to_rad(b.lat)) * std::sin(dlon / 2) * std::sin(dlon / 2);
  // Clamp: rounding can push s marginally outside [0, 1] for antipodal points.
  const double h = std::clamp(s, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

HaversineEstimator::HaversineEstimator(double speed_kmh) : speed_kmh_(speed_kmh) {
  if (!(speed_kmh > 0.0) || !std::isfinite(speed_kmh)) throw ConfigError("speed_kmh must be positive");
}

double HaversineEstimator::estimate(const GeoPoint& a, const GeoPoint& b) const {
  return haversine_km(a, b) / speed_kmh_ * 60.0;
}

std::string HaversineEstimator::describe() const {
  return "haversine@" + std::to_string(speed_kmh_) + "kmh";
}

RoutingApiEstimator::RoutingApiEstimator(RoutingApiConfig config)
    : config_(std::move(config)), fallback_(config_.fallback_speed_kmh) {
  if (config_.endpoint.empty()) throw ConfigError("routing endpoint is empty");
  if (!(config_.timeout_s > 0.0)) throw ConfigError("routing timeout must be positive");
}

std::string RoutingApiEstimator::describe() const { return "routing-api:" + config_.endpoint; }

std::size_t RoutingApiEstimator::fallback_count() const {
  std::lock_guard lock(mu_);
  return fallbacks_;
}

double RoutingApiEstimator::estimate(const GeoPoint& a, const GeoPoint& b) const {
  const auto key = std::make_tuple(a.lat, a.lon, b.lat, b.lon);
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  double minutes = 0.0;
  try {
    minutes = query(a, b);
  } catch (const RoutingUnavailable& e) {
    if (!config_.fallback_on_error) throw;
    spdlog::warn("routing service unavailable ({}); using haversine fallback", e.what());
    minutes = fallback_.estimate(a, b);
    std::lock_guard lock(mu_);
    ++fallbacks_;
  }
  std::lock_guard lock(mu_);
  cache_.emplace(key, minutes);
  return minutes;
}

double RoutingApiEstimator::query(const GeoPoint& a, const GeoPoint& b) const {
  std::string url = config_.endpoint;
  url += url.find('?') == std::string::npos ? '?' : '&';
  url += "origin=" + detail::url_encode(coord(a)) + "&destination=" + detail::url_encode(coord(b)) +
         "&profile=" + detail::url_encode(config_.profile);
  detail::Headers headers;
  if (const char* token = std::getenv(config_.token_env.c_str()); token && *token)
    headers.emplace_back("Authorization", std::string("Bearer ") + token);

  const auto res = detail::http_get(url, headers, config_.timeout_s);
  if (res.status == 0) throw RoutingUnavailable(res.error);
  if (res.status != 200) throw RoutingUnavailable("HTTP " + std::to_string(res.status) + ": " + res.body);

  const auto body = nlohmann::json::parse(res.body, nullptr, /*allow_exceptions=*/false);
  const nlohmann::json* duration = nullptr;
  if (body.is_object()) {
    if (auto it = body.find("duration"); it != body.end()) {
      duration = &*it;
    } else if (auto routes = body.find("routes");
               routes != body.end() && routes->is_array() && !routes->empty() && (*routes)[0].is_object()) {
      if (auto d = (*routes)[0].find("duration"); d != (*routes)[0].end()) duration = &*d;
    }
  }
  if (!duration || !duration->is_number() || duration->get<double>() < 0.0)
    throw RoutingUnavailable("response carries no non-negative duration");
  return duration->get<double>() / 60.0;
}

}  // namespace judgebench
