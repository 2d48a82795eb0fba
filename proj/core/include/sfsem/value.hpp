#pragma once

#include <string>
#include <variant>

namespace sfsem {

// A popped message, bound under the message's name while it is current.
struct MessageRecord {
  double data = 0;
  friend bool operator==(const MessageRecord&, const MessageRecord&) = default;
};

using Value = std::variant<double, std::string, MessageRecord>;

/// Numeric view: numbers as-is, message records by their data field.
/// Returns false for strings.
bool numeric_value(const Value& v, double& out);

/// Shortest round-trip rendering; integral numbers print without a fraction.
std::string format_number(double d);
std::string format_value(const Value& v);

}  // namespace sfsem
