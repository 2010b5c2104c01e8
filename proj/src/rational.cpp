#include "liouville/rational.hpp"

#include "liouville/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace liouville {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

Integer pow10(long e) {
    Integer r = 1;
    for (long i = 0; i < e; ++i) r *= 10;
    return r;
}

// cpp_int reads a leading zero as an octal prefix
Integer decimal_integer(std::string_view digits) {
    digits.remove_prefix(std::min(digits.find_first_not_of('0'), digits.size()));
    return digits.empty() ? Integer(0) : Integer(std::string(digits));
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

Rational parse_decimal(std::string_view s, std::string_view original) {
    bool negative = false;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        std::string_view exp_text = s.substr(e + 1);
        bool exp_negative = false;
        if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
            exp_negative = exp_text.front() == '-';
            exp_text.remove_prefix(1);
        }
        if (!all_digits(exp_text) || exp_text.size() > 6) {
            throw ParseError("rational", "malformed exponent in '" + std::string(original) + "'");
        }
        std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
        if (exp_negative) exponent = -exponent;
        s = s.substr(0, e);
    }
    std::string_view int_part = s;
    std::string_view frac_part;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        int_part = s.substr(0, dot);
        frac_part = s.substr(dot + 1);
    }
    if ((int_part.empty() && frac_part.empty()) || (!int_part.empty() && !all_digits(int_part)) ||
        (!frac_part.empty() && !all_digits(frac_part))) {
        throw ParseError("rational", "not a number: '" + std::string(original) + "'");
    }
    const Integer mantissa = decimal_integer(std::string(int_part) + std::string(frac_part));
    exponent -= static_cast<long>(frac_part.size());
    Rational value = exponent >= 0 ? Rational(mantissa * pow10(exponent))
                                   : Rational(mantissa, pow10(-exponent));
    return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    const std::string_view s = trim(text);
    if (s.empty()) throw ParseError("rational", "empty string");
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        std::string_view num = trim(s.substr(0, slash));
        std::string_view den = trim(s.substr(slash + 1));
        bool negative = false;
        if (!num.empty() && (num.front() == '-' || num.front() == '+')) {
            negative = num.front() == '-';
            num.remove_prefix(1);
        }
        if (!all_digits(num) || !all_digits(den)) {
            throw ParseError("rational", "malformed fraction '" + std::string(s) + "'");
        }
        const Integer d = decimal_integer(den);
        if (d == 0) throw ParseError("rational", "zero denominator in '" + std::string(s) + "'");
        Rational r(decimal_integer(num), d);
        return negative ? Rational(-r) : r;
    }
    return parse_decimal(s, s);
}

std::string to_string(const Rational& value) {
    const Integer& num = boost::multiprecision::numerator(value);
    const Integer& den = boost::multiprecision::denominator(value);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

Integer floor(const Rational& value) {
    const Integer& num = boost::multiprecision::numerator(value);
    const Integer& den = boost::multiprecision::denominator(value);
    Integer q = num / den;  // truncates toward zero
    if (num < 0 && q * den != num) q -= 1;
    return q;
}

bool is_integer(const Rational& value) { return boost::multiprecision::denominator(value) == 1; }

Integer binomial(long n, long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    Integer r = 1;
    for (long i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

}  // namespace liouville
