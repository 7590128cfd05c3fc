#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace relsim {

enum class Errc {
  invalid_argument,  // caller violated a documented precondition
  io,                // filesystem failure
  parse,             // malformed input text
  domain,            // inputs outside the model's domain
  regime,            // analytic formula regime violated
  internal,          // bug: an internal invariant broke
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string msg)
      : std::runtime_error(std::move(msg)), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) {
  throw Error(code, msg);
}

inline void require(bool cond, Errc code, const std::string& msg) {
  if (!cond) raise(code, msg);
}

}  // namespace relsim
