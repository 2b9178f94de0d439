#pragma once

#include <stdexcept>
#include <string>

namespace tat {

/// Input outside the mathematical domain of an operation (point off the
/// curve, endomorphism outside the declared ring, violated hypothesis).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Numerical precision cap exhausted before a certified answer was reached.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Enumeration or elimination budget exceeded; results are partial.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A search over a finite candidate set came back empty.
class SearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal invariant failed (e.g. a non-integral degree).
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed input file; carries the offending line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, int line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace tat
