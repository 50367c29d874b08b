#pragma once

#include <string>

#include <json.hpp>

#include "gtplan/errors.hpp"

namespace gtplan {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline json parse_json(const std::string& text, const std::string& ctx) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(ctx + ": " + e.what());
  }
}

inline const json& get_field(const json& j, const char* key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError(ctx + ": missing field '" + key + "'");
  }
  return j.at(key);
}

inline double get_num(const json& j, const char* key, const std::string& ctx) {
  const json& f = get_field(j, key, ctx);
  if (!f.is_number()) {
    throw ParseError(ctx + "." + key + ": expected a number");
  }
  return f.get<double>();
}

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Fixed-width shortest-roundtrip double formatting for tabular output.
std::string format_double(double v);

}  // namespace gtplan
