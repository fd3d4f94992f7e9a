#include "http_client.hpp"

#include <httplib.h>

#include <cmath>

namespace judgebench::detail {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // /path?query
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

HttpResponse send(const std::string& url, const Headers& headers, double timeout_s,
                  const std::string* post_body) {
  const auto parts = split_url(url);
  HttpResponse out;
  httplib::Client client(parts.origin);
  if (!client.is_valid()) {
    out.error = "unsupported URL scheme: " + parts.origin;
    return out;
  }
  const auto secs = static_cast<time_t>(std::floor(timeout_s));
  const auto usecs = static_cast<time_t>((timeout_s - std::floor(timeout_s)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Headers hdrs;
  for (const auto& [k, v] : headers) hdrs.emplace(k, v);

  auto res = post_body ? client.Post(parts.path, hdrs, *post_body, "application/json")
                       : client.Get(parts.path, hdrs);
  if (!res) {
    out.error = httplib::to_string(res.error());
    out.timed_out = res.error() == httplib::Error::Read || res.error() == httplib::Error::Write ||
                    res.error() == httplib::Error::ConnectionTimeout;
    return out;
  }
  out.status = res->status;
  out.body = res->body;
  return out;
}

}  // namespace

HttpResponse http_get(const std::string& url, const Headers& headers, double timeout_s) {
  return send(url, headers, timeout_s, nullptr);
}

HttpResponse http_post_json(const std::string& url, const Headers& headers, const std::string& body,
                            double timeout_s) {
  return send(url, headers, timeout_s, &body);
}

std::string url_encode(const std::string& s) { return httplib::detail::encode_query_param(s); }

}  // namespace judgebench::detail
