#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace crossfit {

/// Serializes a JSON document with floating-point numbers at 17 significant digits
/// (lossless double round-trip). Non-finite values become null.
inline void dump_json_17(const nlohmann::json& doc, std::ostream& os, int indent = 0,
                         int depth = 0) {
  using nlohmann::json;
  const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent) * depth, ' ');
  const char* nl = indent > 0 ? "\n" : "";
  const char* colon = indent > 0 ? ": " : ":";

  switch (doc.type()) {
    case json::value_t::object: {
      if (doc.empty()) {
        os << "{}";
        return;
      }
      os << '{' << nl;
      bool first = true;
      for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!first) os << ',' << nl;
        first = false;
        os << pad << json(it.key()).dump() << colon;
        dump_json_17(it.value(), os, indent, depth + 1);
      }
      os << nl << close_pad << '}';
      return;
    }
    case json::value_t::array: {
      if (doc.empty()) {
        os << "[]";
        return;
      }
      os << '[' << nl;
      bool first = true;
      for (const auto& item : doc) {
        if (!first) os << ',' << nl;
        first = false;
        os << pad;
        dump_json_17(item, os, indent, depth + 1);
      }
      os << nl << close_pad << ']';
      return;
    }
    case json::value_t::number_float: {
      const double v = doc.get<double>();
      if (!std::isfinite(v)) {
        os << "null";
        return;
      }
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      os << buf;
      // %.17g never emits a decimal point for integral values; keep it a float.
      const std::string s(buf);
      if (s.find_first_of(".eE") == std::string::npos) os << ".0";
      return;
    }
    default:
      os << doc.dump();
      return;
  }
}

inline std::string dump_json_17(const nlohmann::json& doc, int indent = 0) {
  std::ostringstream os;
  dump_json_17(doc, os, indent, 0);
  return os.str();
}

}  // namespace crossfit
