#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <string_view>

namespace contsem {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

/// Parses "p/q", an integer, or a terminating decimal such as "0.25".
Rational parse_rational(std::string_view text);

/// Canonical text form: "p" for integers, otherwise "p/q" in lowest terms.
std::string to_string(const Rational& q);

/// Least common multiple of the denominators; 1 for an empty range.
template <class Range>
Rational common_denominator(const Range& values) {
    using boost::multiprecision::denominator;
    Integer acc = 1;
    for (const Rational& v : values) {
        acc = boost::multiprecision::lcm(acc, denominator(v));
    }
    return Rational(acc);
}

} // namespace contsem
