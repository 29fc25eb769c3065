#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace sykm {

using cxd = std::complex<double>;
inline constexpr cxd I_UNIT{0.0, 1.0};

// Error categories surfaced by the library. CLI maps ConfigError to exit
// code 2 and NonConverged to exit code 3.
enum class ErrorCode {
  Config,
  NonConverged,
  SingularOperator,
  Domain,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline Error config_error(const std::string& what) { return Error(ErrorCode::Config, what); }
inline Error domain_error(const std::string& what) { return Error(ErrorCode::Domain, what); }
inline Error io_error(const std::string& what) { return Error(ErrorCode::Io, what); }

}  // namespace sykm
