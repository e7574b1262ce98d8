#pragma once

#include <string>
#include <string_view>

namespace cartograph {

// "cartograph <version>", stamped into every artifact the toolkit writes.
std::string_view tool_version();

// ISO-8601 UTC timestamp, e.g. "2024-03-01T12:00:00Z". Honors
// SOURCE_DATE_EPOCH so scripted pipelines can produce byte-identical files.
std::string utc_timestamp_now();

// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

// printf("%.*g") with the given significant digits.
std::string format_significant(double value, int digits);

}  // namespace cartograph
