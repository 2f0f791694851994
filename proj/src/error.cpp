#include "bdie/error.hpp"

namespace bdie {

const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::geometry: return "geometry";
    case ErrorCategory::discretization: return "discretization";
    case ErrorCategory::positivity: return "positivity";
    case ErrorCategory::singular_evaluation: return "singular-evaluation";
    case ErrorCategory::condition_check: return "condition-check";
    case ErrorCategory::compatibility: return "compatibility";
    case ErrorCategory::singular_system: return "singular-system";
    case ErrorCategory::domain: return "domain";
    case ErrorCategory::config: return "config";
    case ErrorCategory::unknown_case: return "unknown-case";
  }
  return "unknown";
}

}  // namespace bdie
