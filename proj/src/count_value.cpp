#include "ahcount/count_value.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace ahc {

namespace mp = boost::multiprecision;

double big_log10(const BigInt& value) {
  if (value <= 0) return -std::numeric_limits<double>::infinity();
  const mp::cpp_bin_float_50 v(value);
  return static_cast<double>(mp::log10(v));
}

CountValue CountValue::from_integer(const BigInt& value, double log10_error) {
  if (value < 0) throw std::invalid_argument("CountValue: negative count");
  CountValue out;
  out.log10_ = big_log10(value);
  if (value < BigInt(static_cast<std::uint64_t>(kExactLimit))) {
    out.exact_ = static_cast<std::uint64_t>(value);
    out.log10_error_ = 0.0;
  } else {
    out.exact_.reset();
    out.log10_error_ = log10_error;
  }
  return out;
}

CountValue CountValue::from_log10(double log10_value, double log10_error) {
  CountValue out;
  if (std::isinf(log10_value) && log10_value < 0) return out;
  if (log10_value < std::log10(kExactLimit) && log10_error == 0.0) {
    out.exact_ = static_cast<std::uint64_t>(std::llround(std::pow(10.0, log10_value)));
    out.log10_ = log10_value;
    return out;
  }
  out.exact_.reset();
  out.log10_ = log10_value;
  out.log10_error_ = log10_error;
  return out;
}

double CountValue::log() const noexcept { return log10_ * std::log(10.0); }

std::string CountValue::to_string() const {
  if (exact_) return std::to_string(*exact_);
  std::ostringstream os;
  os.precision(15);
  os << "10^" << log10_;
  return os.str();
}

}  // namespace ahc
