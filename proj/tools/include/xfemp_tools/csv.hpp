#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace xfemp::tools {

/// Shortest round-trippable text for a double (17 significant digits);
/// "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double v);
std::string format_optional(const std::optional<double>& v);
std::string format_optional(const std::optional<int>& v);

/// RFC-4180 field quoting.
std::string csv_escape(const std::string& field);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

/// Splits one RFC-4180 record (no embedded newlines).
std::vector<std::string> csv_split(const std::string& line);

}  // namespace xfemp::tools
