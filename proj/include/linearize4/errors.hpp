#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lin4 {

// Base class for everything thrown by this library.
class EngineError : public std::runtime_error {
 public:
  explicit EngineError(const std::string& what) : std::runtime_error(what) {}
};

class SyntaxError : public EngineError {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : EngineError(what + " (byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Kernel called with the wrong number of arguments.
class ArityError : public SyntaxError {
 public:
  using SyntaxError::SyntaxError;
};

class UnboundSymbolError : public EngineError {
 public:
  explicit UnboundSymbolError(const std::string& name)
      : EngineError("unbound symbol '" + name + "'"), name_(name) {}
  const std::string& symbol() const { return name_; }

 private:
  std::string name_;
};

// Evaluation left the domain of a kernel or hit a singular denominator.
// Carries the offending subexpression in printed form.
class DomainError : public EngineError {
 public:
  explicit DomainError(const std::string& what, std::string subexpression = {})
      : EngineError(subexpression.empty() ? what
                                          : what + " in `" + subexpression + "`"),
        subexpression_(std::move(subexpression)) {}
  const std::string& subexpression() const { return subexpression_; }

 private:
  std::string subexpression_;
};

// A sampling-based decision procedure could not gather enough valid points.
class InconclusiveError : public EngineError {
 public:
  using EngineError::EngineError;
};

}  // namespace lin4
