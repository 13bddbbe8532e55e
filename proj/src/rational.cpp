#include "contsem/rational.hpp"

#include "contsem/error.hpp"

#include <cctype>

namespace contsem {

namespace {

using boost::multiprecision::mpz_int;

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

// mpz_int's string constructor reads a leading 0 as octal.
mpz_int decimal_int(std::string_view digits) {
    while (digits.size() > 1 && digits.front() == '0') digits.remove_prefix(1);
    return mpz_int(std::string{digits});
}

} // namespace

Rational parse_rational(std::string_view text) {
    std::string_view s = trim(text);
    const std::string original(s);
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }

    Rational result;
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        std::string_view num = trim(s.substr(0, slash));
        std::string_view den = trim(s.substr(slash + 1));
        if (!all_digits(num) || !all_digits(den)) {
            throw ParseError("malformed rational '" + original + "'");
        }
        mpz_int d = decimal_int(den);
        if (d == 0) throw ParseError("zero denominator in '" + original + "'");
        result = Rational(decimal_int(num)) / Rational(d);
    } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
        std::string_view whole = s.substr(0, dot);
        std::string_view frac = s.substr(dot + 1);
        if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)) ||
            (whole.empty() && frac.empty())) {
            throw ParseError("malformed decimal '" + original + "'");
        }
        mpz_int scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        mpz_int digits = decimal_int(std::string(whole) + std::string(frac));
        result = Rational(digits) / Rational(scale);
    } else {
        if (!all_digits(s)) throw ParseError("malformed rational '" + original + "'");
        result = Rational(decimal_int(s));
    }
    return negative ? Rational(-result) : result;
}

std::string to_string(const Rational& q) {
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    if (denominator(q) == 1) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

} // namespace contsem
