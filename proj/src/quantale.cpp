#include "contsem/quantale.hpp"

#include "contsem/error.hpp"

namespace contsem {

Mode parse_mode(std::string_view text) {
    if (text == "unit-interval") return Mode::UnitInterval;
    if (text == "extended-nonneg") return Mode::ExtendedNonneg;
    throw ParseError("unknown quantale mode '" + std::string(text) +
                     "' (expected unit-interval or extended-nonneg)");
}

std::string to_string(Mode mode) {
    return mode == Mode::UnitInterval ? "unit-interval" : "extended-nonneg";
}

TruthValue parse_truth(std::string_view text) {
    if (text == "inf" || text == "infinity" || text == "\xE2\x88\x9E") return TruthValue::infinity();
    return TruthValue(parse_rational(text));
}

std::string to_string(const TruthValue& t) {
    return t.is_infinite() ? "inf" : to_string(t.value());
}

TruthValue Quantale::tensor(const TruthValue& a, const TruthValue& b) const {
    if (a.is_infinite() || b.is_infinite()) return truncate(TruthValue::infinity());
    return truncate(TruthValue(a.value() + b.value()));
}

TruthValue Quantale::truncate(const TruthValue& t) const {
    if (bounded() && (t.is_infinite() || t.value() > 1)) return TruthValue(1);
    return t;
}

bool Quantale::contains(const TruthValue& t) const {
    if (t.is_infinite()) return !bounded();
    if (t.value() < 0) return false;
    return !bounded() || t.value() <= 1;
}

TruthValue Quantale::distance(const TruthValue& a, const TruthValue& b) const {
    if (a.is_infinite() && b.is_infinite()) return TruthValue(0);
    if (a.is_infinite() || b.is_infinite()) return TruthValue::infinity();
    Rational diff = a.value() - b.value();
    return TruthValue(diff < 0 ? Rational(-diff) : diff);
}

} // namespace contsem
