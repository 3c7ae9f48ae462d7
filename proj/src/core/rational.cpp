#include "threshq/rational.hpp"

#include <cctype>

namespace threshq {

namespace {

std::optional<boost::multiprecision::cpp_int> parse_integer(std::string_view s) {
  if (s.empty()) return std::nullopt;
  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) return std::nullopt;
  boost::multiprecision::cpp_int value = 0;
  for (char ch : s) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) return std::nullopt;
    value = value * 10 + (ch - '0');
  }
  return negative ? -value : value;
}

std::optional<Rational> parse_decimal(std::string_view s) {
  const auto dot = s.find('.');
  if (dot == std::string_view::npos) {
    auto i = parse_integer(s);
    if (!i) return std::nullopt;
    return Rational(*i);
  }
  std::string digits(s.substr(0, dot));
  std::string_view frac = s.substr(dot + 1);
  if (frac.empty()) return std::nullopt;
  for (char ch : frac)
    if (!std::isdigit(static_cast<unsigned char>(ch))) return std::nullopt;
  if (digits.empty() || digits == "-" || digits == "+") digits += '0';
  auto whole = parse_integer(digits + std::string(frac));
  if (!whole) return std::nullopt;
  boost::multiprecision::cpp_int scale = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
  return Rational(*whole, scale);
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  auto num = parse_integer(text.substr(0, slash));
  auto den = parse_integer(text.substr(slash + 1));
  if (!num || !den || *den == 0) return std::nullopt;
  return Rational(*num, *den);
}

std::string to_string(const Rational& r) {
  if (is_integer(r)) return boost::multiprecision::numerator(r).str();
  return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

bool is_integer(const Rational& r) { return boost::multiprecision::denominator(r) == 1; }

}  // namespace threshq
