#pragma once

// Thin synchronous HTTP helpers over cpp-httplib, private to the library.

#include <string>
#include <utility>
#include <vector>

namespace judgebench::detail {

struct HttpResponse {
  int status = 0;     ///< 0 when no response arrived
  std::string body;
  std::string error;  ///< transport error text when status == 0
  bool timed_out = false;
};

using Headers = std::vector<std::pair<std::string, std::string>>;

HttpResponse http_get(const std::string& url, const Headers& headers, double timeout_s);
HttpResponse http_post_json(const std::string& url, const Headers& headers, const std::string& body,
                            double timeout_s);

std::string url_encode(const std::string& s);

}  // namespace judgebench::detail
