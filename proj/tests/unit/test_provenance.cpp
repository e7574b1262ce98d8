#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "cartograph/provenance.hpp"

TEST_CASE("tool version string") {
  CHECK(cartograph::tool_version().rfind("cartograph ", 0) == 0);
}

TEST_CASE("SOURCE_DATE_EPOCH pins the timestamp") {
  ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  CHECK(cartograph::utc_timestamp_now() == "2023-11-14T22:13:20Z");
  ::setenv("SOURCE_DATE_EPOCH", "0", 1);
  CHECK(cartograph::utc_timestamp_now() == "1970-01-01T00:00:00Z");
  ::unsetenv("SOURCE_DATE_EPOCH");
  const auto now = cartograph::utc_timestamp_now();
  CHECK(now.size() == 20);
  CHECK(now.back() == 'Z');
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.0, 1.0, 0.1, 1.0 / 3.0, 0.2699251729141556, 5e-324, 1e300}) {
    CHECK(std::strtod(cartograph::format_double(v).c_str(), nullptr) == v);
  }
  CHECK(cartograph::format_double(0.25) == "0.25");
  CHECK(cartograph::format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("format_significant") {
  CHECK(cartograph::format_significant(0.16329931618554522, 9) == "0.163299316");
  CHECK(cartograph::format_significant(1.0, 9) == "1");
}
