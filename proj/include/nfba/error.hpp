#ifndef NFBA_ERROR_HPP
#define NFBA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace nfba {

enum class ErrorKind {
  Parse,
  Config,
  Domain,
  Precondition,
  Budget,
  InvariantViolation,
  Io,
  Internal,
};

const char* to_string(ErrorKind kind);

/* Single exception type for the library; the kind maps 1:1 onto the C API
 * status codes. */
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace nfba

#endif
