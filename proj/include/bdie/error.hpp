#pragma once

#include <stdexcept>
#include <string>

namespace bdie {

/// Machine-readable error categories. The CLI maps these onto exit statuses.
enum class ErrorCategory {
  geometry,
  discretization,
  positivity,
  singular_evaluation,
  condition_check,
  compatibility,
  singular_system,
  domain,
  config,
  unknown_case,
};

const char* to_string(ErrorCategory c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

}  // namespace bdie
