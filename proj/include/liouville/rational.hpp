#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace liouville {

/// Arbitrary-precision exact rational. Every algebraic or combinatorial
/// predicate in the library is decided with this type.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

/// Parses "p", "p/q", "-p/q" or a finite decimal such as "1.25" / "-3e-2"
/// into an exact rational. Throws ParseError (field "rational") otherwise.
Rational parse_rational(std::string_view text);

/// "p/q" in lowest terms, or "p" when the denominator is 1.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

Integer floor(const Rational& value);

bool is_integer(const Rational& value);

/// Exact binomial coefficient C(n, k) for n >= 0, 0 <= k.
Integer binomial(long n, long k);

}  // namespace liouville
