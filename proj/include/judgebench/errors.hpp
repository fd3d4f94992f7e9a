#pragma once

#include <stdexcept>
#include <string>

namespace judgebench {

/// Base of every error the library throws. Callers that only need a message
/// can catch this; the subclasses carry the structured fields.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedJson : public Error {
 public:
  using Error::Error;
};

/// A decoded document violates the schema. `field` names the offending key.
class SchemaViolation : public Error {
 public:
  SchemaViolation(std::string field, std::string reason)
      : Error("schema violation at '" + field + "': " + reason),
        field_(std::move(field)),
        reason_(std::move(reason)) {}

  const std::string& field() const noexcept { return field_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string field_;
  std::string reason_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class RoutingUnavailable : public Error {
 public:
  using Error::Error;
};

class BackendFailure : public Error {
 public:
  BackendFailure(std::size_t index, const std::string& what)
      : Error("backend failure at index " + std::to_string(index) + ": " + what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class AlignmentFailure : public Error {
 public:
  using Error::Error;
};

class ExhaustedRetries : public Error {
 public:
  using Error::Error;
};

/// Non-success answer from a chat provider (HTTP status or transport failure).
/// status 0 means the request never produced an HTTP response.
class ProviderError : public Error {
 public:
  ProviderError(int status, std::string body)
      : Error("provider error (status " + std::to_string(status) + "): " + body),
        status_(status),
        body_(std::move(body)) {}
  int status() const noexcept { return status_; }
  const std::string& body() const noexcept { return body_; }

 private:
  int status_;
  std::string body_;
};

class Timeout : public ProviderError {
 public:
  explicit Timeout(const std::string& what) : ProviderError(0, "timeout: " + what) {}
};

class UnknownModel : public Error {
 public:
  explicit UnknownModel(const std::string& model_id) : Error("unknown model: " + model_id) {}
};

/// Judge output that contains no JSON object or no decision field.
class ParseError : public Error {
 public:
  using Error::Error;
};

class MissingAttachment : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// The dataset disagrees with the rule oracle.
class DatasetInvalid : public Error {
 public:
  using Error::Error;
};

}  // namespace judgebench
