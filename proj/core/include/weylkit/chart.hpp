#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "weylkit/errors.hpp"

namespace weylkit {

// A local coordinate chart: a dimension and coordinate names. Every field
// specification (metric, connection, one-form) is expressed against a chart.
// dim >= 2 always; the compatibility machinery additionally requires
// dim >= 3 and enforces that where it matters.
struct Chart {
  int dim = 0;
  std::vector<std::string> coords;

  // x0..x{dim-1}
  static Chart standard(int dim) {
    if (dim < 2) throw Error("chart dimension must be >= 2");
    Chart c;
    c.dim = dim;
    c.coords.reserve(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) c.coords.push_back("x" + std::to_string(i));
    return c;
  }

  static Chart named(std::vector<std::string> names) {
    if (names.size() < 2) throw Error("chart dimension must be >= 2");
    for (std::size_t i = 0; i < names.size(); ++i)
      for (std::size_t j = i + 1; j < names.size(); ++j)
        if (names[i] == names[j])
          throw Error("duplicate coordinate name '" + names[i] + "'");
    Chart c;
    c.dim = static_cast<int>(names.size());
    c.coords = std::move(names);
    return c;
  }

  // -1 when the name is not a coordinate of this chart.
  int index_of(std::string_view name) const {
    for (std::size_t i = 0; i < coords.size(); ++i)
      if (coords[i] == name) return static_cast<int>(i);
    return -1;
  }

  bool operator==(const Chart&) const = default;
};

}  // namespace weylkit
