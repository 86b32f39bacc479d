#pragma once

#include <stdexcept>
#include <string>

namespace biharm {

// Failure classes. The C API and the CLI exit codes map one-to-one onto these.
enum class ErrorKind {
  kArgument,      // caller violated a precondition
  kConfig,        // malformed or invalid experiment configuration
  kProfile,       // coefficient profile failed positivity / coverage checks
  kNumerical,     // factorization breakdown, bracket failure, nonpositive eigenvalue
  kConditioning,  // Gram / HUM system refused because of its condition number
  kResampling,    // tabulated data too coarse for the requested operation
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Positivity violation located at a specific abscissa.
class ProfileError : public Error {
 public:
  ProfileError(const std::string& what, double x) : Error(ErrorKind::kProfile, what), x_(x) {}

  double x() const noexcept { return x_; }

 private:
  double x_;
};

}  // namespace biharm
