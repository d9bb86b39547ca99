#pragma once

#include <stdexcept>
#include <string>

namespace walras {

// Error taxonomy shared by every module. The CLI maps each kind to an
// exit code and a machine readable error object.
enum class ErrorKind {
  feasibility,   // allocation violates supplies
  size,          // input exceeds an enumeration or construction cap
  precondition,  // input violates an operation's documented precondition
  contract,      // a callback (tie-break rule) broke its contract
  parse,         // malformed JSON or scalar text
  internal       // a result failed its own verification; indicates a bug
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::feasibility: return "feasibility";
    case ErrorKind::size: return "size";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::contract: return "contract";
    case ErrorKind::parse: return "parse";
    case ErrorKind::internal: return "internal";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace walras
