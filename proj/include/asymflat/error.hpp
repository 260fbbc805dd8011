#pragma once

#include <stdexcept>
#include <string>

namespace asymflat {

enum class ErrorKind {
  InvalidSpec,     // malformed or inconsistent metric spec
  OutsideDomain,   // evaluation inside r_min or below the half-space
  InvalidInput,    // bad surface, grid or argument
  Degenerate,      // degenerate geometry or input
  NoConvergence,   // iterative solver failed
  TooFewSamples,
  Unsupported
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace asymflat
