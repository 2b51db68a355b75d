#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace toric {

/// Thrown when a computation is well-posed but the numbers do not cooperate:
/// divergent integrands, slope coverage failures, closed-form mismatches.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A real number or +infinity.  Symplectic potentials are +inf outside the
/// polytope; that value never takes part in arithmetic.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  constexpr ExtReal(double v) : value_(v) {}  // NOLINT(implicit)

  static constexpr ExtReal infinity() {
    ExtReal r;
    r.infinite_ = true;
    return r;
  }

  constexpr bool is_finite() const { return !infinite_; }
  constexpr bool is_infinite() const { return infinite_; }

  double value() const {
    if (infinite_) throw NumericError("ExtReal: value() of +inf");
    return value_;
  }

  friend constexpr bool operator==(const ExtReal& a, const ExtReal& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }

  std::string to_string() const;

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

/// Neumaier-compensated running sum.  Every quadrature in the library goes
/// through this so results do not depend on grid traversal quirks.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Formats with 17 significant digits ("inf" for +inf).
std::string format_real(double x);
std::string format_real(const ExtReal& x);

}  // namespace toric
