#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

namespace lbd {

//! Shortest representation that round-trips to the same double.
inline std::string
format_double(double x)
{
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

//! Parses the whole of `text` as a double; false on any trailing garbage.
inline bool
parse_double(std::string_view text, double& out)
{
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
    text.remove_prefix(1);
  }
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' ||
                           text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (!text.empty() && text.front() == '+') {
    text.remove_prefix(1);
  }
  if (text.empty()) {
    return false;
  }
  auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

} // namespace lbd
