#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sfsem {

// Base of every error the interpreter reports to callers.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A path or function name that does not resolve in the chart.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Expression or condition evaluation failed (unbound variable, division by
// zero, `every` with a zero period, ...).
class EvalError : public Error {
 public:
  using Error::Error;
};

// No semantic rule applies: a default transition list that reaches no state,
// a graphical function that does not end at a terminal junction, and so on.
class SemanticError : public Error {
 public:
  using Error::Error;
};

// The per-round rule-application budget ran out.
class BudgetError : public Error {
 public:
  using Error::Error;
};

struct Diagnostic {
  std::string code;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

// Malformed JSON, schema violations, or a chart that fails validation.
class LoadError : public Error {
 public:
  explicit LoadError(std::string message,
                     std::vector<Diagnostic> diagnostics = {})
      : Error(std::move(message)), diagnostics_(std::move(diagnostics)) {}

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

}  // namespace sfsem
