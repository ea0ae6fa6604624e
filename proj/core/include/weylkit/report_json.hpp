#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "weylkit/format.hpp"

namespace weylkit {

// Minimal streaming JSON writer with pinned output bytes: fixed field order
// (caller-controlled), minified separators, 17-significant-digit doubles.
// Reports written through this class are byte-identical across runs.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(std::string_view k);

  JsonWriter& value(double v);
  JsonWriter& value(std::int64_t v);
  JsonWriter& value(std::uint64_t v);
  JsonWriter& value(int v) { return value(static_cast<std::int64_t>(v)); }
  JsonWriter& value(bool v);
  JsonWriter& value(std::string_view v);
  JsonWriter& value(const char* v) { return value(std::string_view(v)); }
  JsonWriter& null();

  // Injects pre-serialized JSON (used to embed the scenario echo).
  JsonWriter& raw(std::string_view json);

  template <typename T>
  JsonWriter& kv(std::string_view k, T v) {
    key(k);
    return value(v);
  }

  JsonWriter& number_array(std::string_view k, const std::vector<double>& v);

  const std::string& str() const { return out_; }

 private:
  void separate();

  std::string out_;
  std::vector<int> counts_;  // items emitted in each open container
  bool pending_key_ = false;
};

std::string json_escape(std::string_view s);

}  // namespace weylkit
