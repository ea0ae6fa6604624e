#pragma once

#include <cstdio>
#include <string>

namespace weylkit {

// Fixed 17-significant-digit decimal formatting used for every number the
// toolkit writes to JSON reports and CSV traces. 17 digits round-trip IEEE
// doubles bit-exactly, so repeated runs emit byte-identical output.
inline std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf);
}

}  // namespace weylkit
