#pragma once

#include <algorithm>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace classroom_ai {

enum class Severity { error, warning };

struct Diagnostic {
  Severity severity = Severity::error;
  std::string field;  // JSON-pointer-like path, e.g. "payload.connections[2]"
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

class ValidationReport {
 public:
  void error(std::string field, std::string message) {
    items_.push_back({Severity::error, std::move(field), std::move(message)});
  }
  void warning(std::string field, std::string message) {
    items_.push_back({Severity::warning, std::move(field), std::move(message)});
  }
  void merge(const ValidationReport& other) {
    items_.insert(items_.end(), other.items_.begin(), other.items_.end());
  }

  bool ok() const {
    return std::none_of(items_.begin(), items_.end(),
                        [](const Diagnostic& d) { return d.severity == Severity::error; });
  }
  std::size_t error_count() const {
    return static_cast<std::size_t>(std::count_if(
        items_.begin(), items_.end(), [](const Diagnostic& d) { return d.severity == Severity::error; }));
  }
  std::size_t warning_count() const { return items_.size() - error_count(); }
  bool empty() const { return items_.empty(); }
  const std::vector<Diagnostic>& items() const { return items_; }

  bool has_error_containing(std::string_view needle) const {
    return std::any_of(items_.begin(), items_.end(), [&](const Diagnostic& d) {
      return d.severity == Severity::error && d.message.find(needle) != std::string::npos;
    });
  }
  bool has_warning_containing(std::string_view needle) const {
    return std::any_of(items_.begin(), items_.end(), [&](const Diagnostic& d) {
      return d.severity == Severity::warning && d.message.find(needle) != std::string::npos;
    });
  }

  nlohmann::json to_json() const {
    auto arr = nlohmann::json::array();
    for (const auto& d : items_) {
      arr.push_back({{"severity", d.severity == Severity::error ? "error" : "warning"},
                     {"field", d.field},
                     {"message", d.message}});
    }
    return {{"ok", ok()}, {"diagnostics", arr}};
  }

  void print(std::ostream& os) const {
    for (const auto& d : items_) {
      os << (d.severity == Severity::error ? "error" : "warning") << ": " << d.field << ": " << d.message
         << '\n';
    }
    os << error_count() << " error(s), " << warning_count() << " warning(s)\n";
  }

 private:
  std::vector<Diagnostic> items_;
};

}  // namespace classroom_ai
