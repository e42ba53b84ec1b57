#include "lexfn/error.hpp"

namespace lexfn {

std::string_view category_name(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::rejected_input: return "rejected-input";
    case ErrorCategory::missing_word: return "missing-word";
    case ErrorCategory::numerical_failure: return "numerical-failure";
    case ErrorCategory::parse: return "parse";
    case ErrorCategory::format: return "format";
    case ErrorCategory::integrity: return "integrity";
    case ErrorCategory::degenerate_objective: return "degenerate-objective";
    case ErrorCategory::undefined_correlation: return "undefined-correlation";
    case ErrorCategory::empty_evaluation: return "empty-evaluation";
    case ErrorCategory::usage: return "usage";
  }
  return "unknown";
}

}  // namespace lexfn
