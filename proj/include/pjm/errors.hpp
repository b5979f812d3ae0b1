#ifndef PJM_ERRORS_HPP
#define PJM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pjm {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: bad dimensions, violated zero-sum constraints,
/// non-finite values, out-of-range arguments.
class DomainError : public Error {
public:
  using Error::Error;
};

/// A numerical procedure could not deliver a result that satisfies its
/// contract (bracket failure, inconsistent spectral data, stalled solve).
class NumericalError : public Error {
public:
  using Error::Error;
};

/// Unreadable input or malformed JSON.
class IoError : public Error {
public:
  using Error::Error;
};

/// Root isolation lost a sign change, typically because two roots are
/// numerically coincident.
class ResolutionError : public NumericalError {
public:
  ResolutionError(const std::string& what, double lo, double hi)
      : NumericalError(what + " in bracket [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]"),
        lo_(lo), hi_(hi) {}

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

private:
  double lo_;
  double hi_;
};

} // namespace pjm

#endif // PJM_ERRORS_HPP
