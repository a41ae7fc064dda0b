#ifndef NEUTOMO_FORMAT_HPP_
#define NEUTOMO_FORMAT_HPP_

#include <charconv>
#include <string>
#include <system_error>

#include "neutomo/error.hpp"

namespace neutomo {

/// Shortest decimal form that round-trips the exact double. Locale-free and
/// byte-stable, so seeded reruns emit identical artifacts.
inline std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw Error("double formatting failed");
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw Error("bad numeric field: \"" + std::string(text) + "\"");
  return value;
}

inline long parse_long(std::string_view text) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw Error("bad integer field: \"" + std::string(text) + "\"");
  return value;
}

}  // namespace neutomo

#endif  // NEUTOMO_FORMAT_HPP_
