#include "colier/common/numbers.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace colier {

std::string format_real(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string format_int(std::int64_t v) { return std::to_string(v); }

std::optional<double> parse_real(std::string_view text) {
  if (text.empty() || text.size() > 64) return std::nullopt;
  // from_chars rejects a leading '+', accept it for interop.
  if (text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v,
                                   std::chars_format::general);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::int64_t> parse_int(std::string_view text) {
  if (text.empty() || text.size() > 32) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

Json json_real(double v) {
  constexpr double kExact = 9007199254740992.0;  // 2^53
  if (v == 0.0) return Json(std::int64_t{0});
  if (std::trunc(v) == v && std::fabs(v) <= kExact) {
    return Json(static_cast<std::int64_t>(v));
  }
  return Json(v);
}

std::optional<double> json_as_real(const Json& node) {
  if (node.is_number()) {
    double v = node.get<double>();
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  }
  if (node.is_string()) return parse_real(node.get_ref<const std::string&>());
  return std::nullopt;
}

std::optional<std::int64_t> json_as_int(const Json& node) {
  if (node.is_number_integer()) {
    if (node.is_number_unsigned()) {
      auto u = node.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(INT64_MAX)) return std::nullopt;
      return static_cast<std::int64_t>(u);
    }
    return node.get<std::int64_t>();
  }
  if (node.is_number_float()) {
    double v = node.get<double>();
    if (std::trunc(v) != v || std::fabs(v) > 9007199254740992.0) return std::nullopt;
    return static_cast<std::int64_t>(v);
  }
  if (node.is_string()) return parse_int(node.get_ref<const std::string&>());
  return std::nullopt;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace colier
