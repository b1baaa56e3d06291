#include <doctest.h>

#include <cmath>

#include "ahcount/count_value.hpp"

using namespace ahc;

TEST_CASE("zero count") {
  const CountValue z = CountValue::zero();
  CHECK(z.is_zero());
  CHECK(z.is_exact());
  CHECK(std::isinf(z.log10()));
  CHECK(z.log10() < 0);
  CHECK(z.to_string() == "0");
}

TEST_CASE("small integers stay exact") {
  const CountValue c = CountValue::from_integer(BigInt(791));
  CHECK(c.is_exact());
  CHECK(*c.exact() == 791u);
  CHECK(c.to_string() == "791");
  CHECK(c.log10() == doctest::Approx(std::log10(791.0)).epsilon(1e-15));
  CHECK(c.log() == doctest::Approx(std::log(791.0)).epsilon(1e-15));
}

TEST_CASE("counts past the exact limit switch to log10") {
  BigInt big = 1;
  for (int i = 0; i < 40; ++i) big *= 10;
  const CountValue c = CountValue::from_integer(big);
  CHECK_FALSE(c.is_exact());
  CHECK(c.log10() == doctest::Approx(40.0).epsilon(1e-15));
  CHECK(c.to_string().rfind("10^", 0) == 0);
}

TEST_CASE("big_log10 resolves adjacent integers") {
  BigInt a = 1;
  for (int i = 0; i < 15; ++i) a *= 7;
  const double la = big_log10(a);
  CHECK(la == doctest::Approx(15.0 * std::log10(7.0)).epsilon(1e-14));
  CHECK(big_log10(a + 1) > la);
}

TEST_CASE("log10 form carries its error bound") {
  const CountValue c = CountValue::from_log10(123.5, 1e-9);
  CHECK_FALSE(c.is_exact());
  CHECK(c.log10() == 123.5);
  CHECK(c.log10_error() == 1e-9);
}
