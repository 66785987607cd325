#include <cmath>
#include <random>

#include "doctest.h"
#include "unemap/text_io.hpp"

using namespace unemap::text;

TEST_CASE("format_double round-trips bitwise") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    const auto back = parse_double(format_double(v));
    REQUIRE(back.has_value());
    CHECK(*back == v);
  }
  CHECK(format_double(0.0) == "0");
}

TEST_CASE("format_fixed rounds halves away from zero") {
  CHECK(format_fixed(59.075, 2) == "59.08");
  CHECK(format_fixed(1.005, 2) == "1.01");
  CHECK(format_fixed(2.5, 0) == "3");
  CHECK(format_fixed(-0.125, 2) == "-0.13");
  CHECK(format_fixed(12.0, 2) == "12.00");
}

TEST_CASE("parse rejects garbage") {
  CHECK_FALSE(parse_double("abc").has_value());
  CHECK_FALSE(parse_double("1.5x").has_value());
  CHECK_FALSE(parse_double("").has_value());
  CHECK_FALSE(parse_double("nan").has_value());
  CHECK(parse_double(" 2.5 ").value() == 2.5);
  CHECK(parse_int("42").value() == 42);
  CHECK_FALSE(parse_int("4.2").has_value());
}

TEST_CASE("split_fields honours quotes") {
  const auto f = split_fields("a,\"b,c\",,\"d\"\"e\"", ',');
  REQUIRE(f.size() == 4);
  CHECK(f[0] == "a");
  CHECK(f[1] == "b,c");
  CHECK(f[2] == "");
  CHECK(f[3] == "d\"e");
  CHECK(quote_field("b,c", ',') == "\"b,c\"");
  CHECK(split_fields(quote_field("x\"y,z", ','), ',')[0] == "x\"y,z");
}
