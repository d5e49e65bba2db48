#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace fencelab {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// "p/q" or "p"; throws std::invalid_argument on junk
Rational parse_rational(const std::string& text);
std::string format_rational(const Rational& r);

// fixed decimals, ties to even
std::string format_decimal(const Rational& r, int places);

Rational dyadic(long long k, int exponent);  // k / 2^exponent

}  // namespace fencelab
