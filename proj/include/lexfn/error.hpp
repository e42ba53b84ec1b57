#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lexfn {

enum class ErrorCategory {
  rejected_input,
  missing_word,
  numerical_failure,
  parse,
  format,
  integrity,
  degenerate_objective,
  undefined_correlation,
  empty_evaluation,
  usage,
};

/// Machine-parseable name of a category, e.g. "missing-word".
std::string_view category_name(ErrorCategory category);

/// Base of every error thrown by the library. The category decides the CLI
/// exit code and the prefix of the one-line diagnostic.
class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class RejectedInput : public Error {
 public:
  explicit RejectedInput(const std::string& message)
      : Error(ErrorCategory::rejected_input, message) {}
};

class MissingWord : public Error {
 public:
  MissingWord(std::string word, const std::string& context)
      : Error(ErrorCategory::missing_word, "unknown word '" + word + "'" + (context.empty() ? "" : " (" + context + ")")),
        word_(std::move(word)) {}

  const std::string& word() const noexcept { return word_; }

 private:
  std::string word_;
};

class NumericalFailure : public Error {
 public:
  explicit NumericalFailure(const std::string& message)
      : Error(ErrorCategory::numerical_failure, message) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& message)
      : Error(ErrorCategory::parse, path + ":" + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& message) : Error(ErrorCategory::format, message) {}
};

class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& message)
      : Error(ErrorCategory::integrity, message) {}
};

class DegenerateObjective : public Error {
 public:
  explicit DegenerateObjective(const std::string& message)
      : Error(ErrorCategory::degenerate_objective, message) {}
};

class UndefinedCorrelation : public Error {
 public:
  explicit UndefinedCorrelation(const std::string& message)
      : Error(ErrorCategory::undefined_correlation, message) {}
};

class EmptyEvaluation : public Error {
 public:
  explicit EmptyEvaluation(const std::string& message)
      : Error(ErrorCategory::empty_evaluation, message) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& message) : Error(ErrorCategory::usage, message) {}
};

}  // namespace lexfn
