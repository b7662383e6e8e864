#include <doctest.h>

#include <cmath>
#include <limits>

#include "pisa/errors.hpp"
#include "pisa/text.hpp"

using namespace pisa;

TEST_CASE("format_double round-trips exactly") {
  const double cases[] = {0.0,    1.0,        -1.0,    0.1,   1.0 / 3.0, 9.81,
                          0.0625, 1e-300,     1e300,   -2.5e-7, 123456.789,
                          std::nextafter(1.0, 2.0)};
  for (double v : cases) {
    CAPTURE(v);
    CHECK(parse_double(format_double(v), "t") == v);
  }
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("format_int") {
  CHECK(format_int(0) == "0");
  CHECK(format_int(-17) == "-17");
  CHECK(parse_int("9223372036854775807", "t") == 9223372036854775807LL);
}

TEST_CASE("strict parsers reject junk") {
  CHECK_THROWS_AS(parse_double("", "t"), ValidationError);
  CHECK_THROWS_AS(parse_double("abc", "t"), ValidationError);
  CHECK_THROWS_AS(parse_double("1.5x", "t"), ValidationError);
  CHECK_THROWS_AS(parse_double("1.2.3", "t"), ValidationError);
  CHECK_THROWS_AS(parse_int("1.5", "t"), ValidationError);
  CHECK_THROWS_AS(parse_int("", "t"), ValidationError);
}

TEST_CASE("trim and split") {
  CHECK(trim("  a b \t") == "a b");
  CHECK(trim("") == "");
  auto parts = split("a,b,,c", ',');
  REQUIRE(parts.size() == 4);
  CHECK(parts[0] == "a");
  CHECK(parts[2] == "");
  CHECK(split("", ',').size() == 1);
}
