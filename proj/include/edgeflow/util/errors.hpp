#pragma once

#include <stdexcept>
#include <string>

namespace edgeflow {

// Base for all errors raised by this project.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input text (config files, flow definitions, scenario files).
// Carries a human-readable location ("file:line") when one is known.
class ParseError : public Error {
public:
  ParseError(const std::string& where, const std::string& what)
      : Error(where.empty() ? what : where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

private:
  std::string where_;
};

// A precondition on an operation's arguments does not hold.
class ParameterError : public Error {
public:
  using Error::Error;
};

// A required (operation, site) cost entry is absent.
class LookupError : public Error {
public:
  using Error::Error;
};

// A plan cannot be costed with the given configuration (e.g. no local
// analyze cost exists). Distinct from LookupError so callers can treat
// "plan unavailable" as a result rather than a configuration bug.
class PlanUnavailableError : public Error {
public:
  using Error::Error;
};

// Referenced entity (run, task, transfer) does not exist.
class NotFoundError : public Error {
public:
  using Error::Error;
};

// Least-squares fit failed (degenerate design, non-physical estimate).
class FitError : public Error {
public:
  using Error::Error;
};

// Structural validation failed (flow graphs, scenarios, specs).
class ValidationError : public Error {
public:
  using Error::Error;
};

// Socket / framing failures.
class NetError : public Error {
public:
  using Error::Error;
};

// Illegal state-machine transition or engine misuse.
class StateError : public Error {
public:
  using Error::Error;
};

}  // namespace edgeflow
