#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace intent_orch {

/// Malformed input text. `line` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line = 0, std::string source = {})
      : std::runtime_error(format(what, line, source)),
        line_(line),
        source_(std::move(source)) {}

  int line() const { return line_; }
  const std::string& source() const { return source_; }

 private:
  static std::string format(const std::string& what, int line,
                            const std::string& source) {
    std::string out;
    if (!source.empty()) out += source + ":";
    if (line > 0) out += std::to_string(line) + ":";
    if (!out.empty()) out += " ";
    return out + what;
  }

  int line_;
  std::string source_;
};

/// Well-formed input that violates a domain invariant.
class ValidationError : public ParseError {
 public:
  using ParseError::ParseError;
};

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A metrics source could not produce data for a node. Retryable.
class UnavailableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProbeError : public std::runtime_error {
 public:
  ProbeError(const std::string& what, std::vector<std::string> failures)
      : std::runtime_error(what), failures_(std::move(failures)) {}

  const std::vector<std::string>& failures() const { return failures_; }

 private:
  std::vector<std::string> failures_;
};

/// Caller broke an operation's precondition.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The control loop gave up (e.g. provider failure budget exhausted).
class FatalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace intent_orch
