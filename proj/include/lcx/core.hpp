#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace lcx {

using Index = Eigen::Index;

template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// A point of a box in R^n, n <= 2. Fixed max size keeps it allocation-free.
template <class Scalar>
using Point = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, Eigen::ColMajor, 2, 1>;

using Pointd = Point<double>;
using VectorXd = VectorX<double>;

enum class ErrorKind { domain, usage, precondition, improper };

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::usage: return "usage";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::improper: return "improper";
  }
  return "unknown";
}

/// Every contract violation raised by the library. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

template <class Scalar>
constexpr Scalar infinity() {
  return std::numeric_limits<Scalar>::infinity();
}

/// Extended real number: a finite value, +inf or -inf. NaN is never representable.
template <class Scalar>
class ExtReal {
 public:
  constexpr ExtReal() = default;
  ExtReal(Scalar value) : value_(value) {  // NOLINT(google-explicit-constructor)
    if (std::isnan(value)) fail(ErrorKind::domain, "NaN is not an extended real");
  }

  static ExtReal pos_inf() { return ExtReal(infinity<Scalar>()); }
  static ExtReal neg_inf() { return ExtReal(-infinity<Scalar>()); }

  Scalar value() const { return value_; }
  bool is_finite() const { return std::isfinite(value_); }
  bool is_pos_inf() const { return value_ == infinity<Scalar>(); }
  bool is_neg_inf() const { return value_ == -infinity<Scalar>(); }

  ExtReal operator-() const { return ExtReal(-value_); }

  /// +inf + -inf is rejected rather than evaluated.
  friend ExtReal operator+(ExtReal a, ExtReal b) {
    if ((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf()))
      fail(ErrorKind::domain, "(+inf) + (-inf) is undefined");
    return ExtReal(a.value_ + b.value_);
  }
  friend ExtReal operator-(ExtReal a, ExtReal b) { return a + (-b); }

  friend bool operator==(ExtReal a, ExtReal b) { return a.value_ == b.value_; }
  friend auto operator<=>(ExtReal a, ExtReal b) {
    // total order: no NaN can be stored
    if (a.value_ < b.value_) return std::strong_ordering::less;
    if (a.value_ > b.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  Scalar value_{0};
};

using ExtReald = ExtReal<double>;

/// Relative tolerances. Absolute feasibility tolerance is feas_rel * (1 + ||f||_inf).
struct Tolerances {
  double feas_rel = 1e-9;
  double lp_rel = 1e-7;
};

}  // namespace lcx
