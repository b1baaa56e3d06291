#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace ahc {

using BigInt = boost::multiprecision::cpp_int;

/// Nonnegative eigenvalue count that may be astronomically large.
///
/// Counts below `kExactLimit` are carried as exact integers. Larger counts are
/// carried as a base-10 logarithm together with an absolute error bound on
/// that logarithm.
class CountValue {
 public:
  static constexpr double kExactLimit = 1e15;

  CountValue() = default;

  static CountValue from_integer(const BigInt& value, double log10_error = 0.0);
  static CountValue from_log10(double log10_value, double log10_error);
  static CountValue zero() { return CountValue{}; }

  bool is_zero() const noexcept { return exact_ && *exact_ == 0; }
  bool is_exact() const noexcept { return exact_.has_value(); }
  std::optional<std::uint64_t> exact() const noexcept { return exact_; }

  /// log10 of the count; -infinity for zero.
  double log10() const noexcept { return log10_; }
  double log10_error() const noexcept { return log10_error_; }

  /// Natural log of the count; -infinity for zero.
  double log() const noexcept;

  /// Decimal rendering: the integer when exact, otherwise "10^x".
  std::string to_string() const;

 private:
  std::optional<std::uint64_t> exact_{0};
  double log10_ = -std::numeric_limits<double>::infinity();
  double log10_error_ = 0.0;
};

/// log10 of a big integer, computed in 50-digit floating point.
double big_log10(const BigInt& value);

}  // namespace ahc
