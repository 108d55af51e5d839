#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace newsjump::csv {

/// Splits one delimited line. Double quotes group a field; `""` inside a
/// quoted field is a literal quote. A trailing '\r' is dropped.
std::vector<std::string> split(std::string_view line, char delimiter = ',');

/// Quotes a field when it contains the delimiter, a quote or a newline.
std::string escape(std::string_view field, char delimiter = ',');

std::optional<double> to_double(std::string_view text);

/// `%g` formatting with `significant` digits; NaN becomes an empty field.
std::string num(double value, int significant = 10);

std::string join(const std::vector<std::string>& fields, char delimiter = ',');

}  // namespace newsjump::csv
