#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "classroom_ai/error.hpp"
#include "classroom_ai/validation.hpp"

namespace classroom_ai {

using nlohmann::json;

namespace action_fields {

// Readers for action payloads; any shape problem is a malformed-action error.

inline const json& require(const json& obj, std::string_view key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw EngineError(ErrorCode::malformed_action, "missing field '" + std::string(key) + "'");
  return *it;
}

inline std::string string(const json& obj, std::string_view key) {
  const json& v = require(obj, key);
  if (!v.is_string()) throw EngineError(ErrorCode::malformed_action, "'" + std::string(key) + "' must be a string");
  return v.get<std::string>();
}

inline std::optional<std::string> optional_string(const json& obj, std::string_view key) {
  if (!obj.is_object()) return std::nullopt;
  const auto it = obj.find(std::string(key));
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return string(obj, key);
}

inline std::int64_t integer(const json& obj, std::string_view key) {
  const json& v = require(obj, key);
  if (!v.is_number_integer()) throw EngineError(ErrorCode::malformed_action, "'" + std::string(key) + "' must be an integer");
  return v.get<std::int64_t>();
}

inline bool boolean(const json& obj, std::string_view key) {
  const json& v = require(obj, key);
  if (!v.is_boolean()) throw EngineError(ErrorCode::malformed_action, "'" + std::string(key) + "' must be true or false");
  return v.get<bool>();
}

inline const json& object(const json& obj, std::string_view key) {
  const json& v = require(obj, key);
  if (!v.is_object()) throw EngineError(ErrorCode::malformed_action, "'" + std::string(key) + "' must be an object");
  return v;
}

inline const json& array(const json& obj, std::string_view key) {
  const json& v = require(obj, key);
  if (!v.is_array()) throw EngineError(ErrorCode::malformed_action, "'" + std::string(key) + "' must be an array");
  return v;
}

}  // namespace action_fields

/// Reads one JSON object of a lesson config, recording problems in a report
/// instead of throwing. Every accessor returns nullopt/nullptr on failure.
class ConfigReader {
 public:
  ConfigReader(const json& obj, std::string path, ValidationReport& report)
      : obj_(obj), path_(std::move(path)), report_(report) {
    if (!obj_.is_object()) report_.error(path_, "must be a JSON object");
  }

  bool valid() const { return obj_.is_object(); }
  const std::string& path() const { return path_; }
  std::string field(std::string_view key) const { return path_ + "." + std::string(key); }
  bool has(std::string_view key) const { return valid() && obj_.contains(key); }

  const json* get(std::string_view key, bool required) {
    if (!valid()) return nullptr;
    auto it = obj_.find(key);
    if (it == obj_.end()) {
      if (required) report_.error(field(key), "required field is missing");
      return nullptr;
    }
    return &*it;
  }

  std::optional<std::string> string(std::string_view key, bool required = true) {
    const json* v = get(key, required);
    if (!v) return std::nullopt;
    if (!v->is_string()) {
      report_.error(field(key), "must be a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<std::int64_t> integer(std::string_view key, bool required = true) {
    const json* v = get(key, required);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) {
      report_.error(field(key), "must be an integer");
      return std::nullopt;
    }
    return v->get<std::int64_t>();
  }

  std::optional<double> number(std::string_view key, bool required = true) {
    const json* v = get(key, required);
    if (!v) return std::nullopt;
    if (!v->is_number()) {
      report_.error(field(key), "must be a number");
      return std::nullopt;
    }
    return v->get<double>();
  }

  const json* array(std::string_view key, bool required = true) {
    const json* v = get(key, required);
    if (v && !v->is_array()) {
      report_.error(field(key), "must be an array");
      return nullptr;
    }
    return v;
  }

  const json* object(std::string_view key, bool required = true) {
    const json* v = get(key, required);
    if (v && !v->is_object()) {
      report_.error(field(key), "must be an object");
      return nullptr;
    }
    return v;
  }

  /// Unknown fields are reported as warnings.
  void warn_unknown(std::initializer_list<std::string_view> known) {
    if (!valid()) return;
    const std::set<std::string_view> allowed(known);
    for (const auto& [key, value] : obj_.items()) {
      if (!allowed.contains(key)) report_.warning(field(key), "unknown field");
    }
  }

  ValidationReport& report() { return report_; }

 private:
  const json& obj_;
  std::string path_;
  ValidationReport& report_;
};

inline std::string indexed(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

}  // namespace classroom_ai
