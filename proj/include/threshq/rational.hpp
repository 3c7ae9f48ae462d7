#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace threshq {

using Rational = boost::multiprecision::cpp_rational;

/// Parses "p/q", an integer, or a finite decimal ("0.25", "-3.125") exactly.
/// Returns nullopt on malformed text or a zero denominator.
std::optional<Rational> parse_rational(std::string_view text);

std::string to_string(const Rational& r);
double to_double(const Rational& r);

/// True when r is an integer.
bool is_integer(const Rational& r);

}  // namespace threshq
