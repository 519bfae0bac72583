#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace trashfuzz {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
public:
  SyntaxError(std::size_t line, std::size_t column, std::vector<std::string> expected,
              const std::string& found)
      : Error(compose(line, column, expected, found)),
        line_(line),
        column_(column),
        expected_(std::move(expected)) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
  static std::string compose(std::size_t line, std::size_t column,
                             const std::vector<std::string>& expected, const std::string& found) {
    std::string msg = "syntax error at " + std::to_string(line) + ":" + std::to_string(column);
    if (!found.empty()) msg += " near '" + found + "'";
    if (!expected.empty()) {
      msg += ", expected one of:";
      for (const auto& e : expected) msg += " " + e;
    }
    return msg;
  }

  std::size_t line_;
  std::size_t column_;
  std::vector<std::string> expected_;
};

class UnknownSignal : public Error {
public:
  explicit UnknownSignal(const std::string& name)
      : Error("unknown signal '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

class IndexOutOfRange : public Error {
public:
  IndexOutOfRange(std::size_t index, std::size_t size)
      : Error("time step " + std::to_string(index) + " outside trace of length " +
              std::to_string(size)) {}
};

class GoalExplosion : public Error {
public:
  GoalExplosion(const std::string& subformula, std::size_t cap)
      : Error("violation goal count exceeds cap " + std::to_string(cap) + " at: " + subformula),
        subformula_(subformula) {}
  const std::string& subformula() const noexcept { return subformula_; }

private:
  std::string subformula_;
};

class UnknownTypeId : public Error {
public:
  explicit UnknownTypeId(double id) : Error("unknown object type id " + std::to_string(id)) {}
};

class NonFiniteValue : public Error {
public:
  using Error::Error;
};

class MutationStuck : public Error {
public:
  using Error::Error;
};

class RegionEmpty : public Error {
public:
  explicit RegionEmpty(const std::string& what)
      : Error("compliant placement region is empty for " + what), what_(what) {}
  const std::string& what_class() const noexcept { return what_; }

private:
  std::string what_;
};

class MalformedMap : public Error {
public:
  using Error::Error;
};

class NoRoute : public Error {
public:
  using Error::Error;
};

class InvalidScenario : public Error {
public:
  using Error::Error;
};

class SutFailure : public Error {
public:
  using Error::Error;
};

class SignalContractViolation : public Error {
public:
  explicit SignalContractViolation(std::vector<std::string> missing)
      : Error(compose(missing)), missing_(std::move(missing)) {}
  const std::vector<std::string>& missing() const noexcept { return missing_; }

private:
  static std::string compose(const std::vector<std::string>& missing) {
    std::string msg = "trace is missing declared signals:";
    for (const auto& m : missing) msg += " " + m;
    return msg;
  }
  std::vector<std::string> missing_;
};

class ZeroDelta : public Error {
public:
  ZeroDelta() : Error("scenarios do not differ in the mutated cell") {}
};

/// Raised when a JSON document does not match the expected schema.
class SchemaError : public Error {
public:
  using Error::Error;
};

}  // namespace trashfuzz
