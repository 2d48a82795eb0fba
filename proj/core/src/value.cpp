#include "sfsem/value.hpp"

#include <charconv>
#include <cmath>

namespace sfsem {

bool numeric_value(const Value& v, double& out) {
  if (const auto* d = std::get_if<double>(&v)) {
    out = *d;
    return true;
  }
  if (const auto* m = std::get_if<MessageRecord>(&v)) {
    out = m->data;
    return true;
  }
  return false;
}

std::string format_number(double d) {
  if (d == 0) return "0";  // folds -0
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, end);
}

std::string format_value(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_number(*d);
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return "message(" + format_number(std::get<MessageRecord>(v).data) + ")";
}

}  // namespace sfsem
