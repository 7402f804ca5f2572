#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kosmann {

// Error taxonomy: Parse (bad expression/geometry text), Validation (loaded
// data violates a precondition), Domain (numeric evaluation hit a pole),
// Internal (invariant broken; a bug, not user input).
struct Error : std::runtime_error {
  enum class Kind { Parse, Validation, Domain, Internal };
  Kind kind;
  Error(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

struct ParseError : Error {
  std::size_t offset;  // byte offset into the source text
  ParseError(const std::string& msg, std::size_t off)
      : Error(Kind::Parse, msg + " (offset " + std::to_string(off) + ")"),
        offset(off) {}
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& msg) : Error(Kind::Validation, msg) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& msg) : Error(Kind::Domain, msg) {}
};

struct InternalError : Error {
  explicit InternalError(const std::string& msg) : Error(Kind::Internal, msg) {}
};

}  // namespace kosmann
