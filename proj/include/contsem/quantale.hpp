#pragma once

#include "contsem/rational.hpp"

#include <compare>
#include <string>
#include <string_view>

namespace contsem {

/// Which quantale of truth values is in force.
///
/// UnitInterval is ([0,1], truncated +, 0); ExtendedNonneg is ([0,inf], +, 0)
/// with an explicit infinite element. In both, 0 is "true" and smaller means
/// truer.
enum class Mode { UnitInterval, ExtendedNonneg };

Mode parse_mode(std::string_view text);
std::string to_string(Mode mode);

/// An element of the carrier: an exact rational or the infinite top.
class TruthValue {
public:
    TruthValue() = default;
    TruthValue(Rational value) : value_(std::move(value)) {}
    TruthValue(long value) : value_(value) {}
    TruthValue(int value) : value_(value) {}

    static TruthValue infinity() {
        TruthValue t;
        t.infinite_ = true;
        return t;
    }

    bool is_infinite() const noexcept { return infinite_; }
    bool is_finite() const noexcept { return !infinite_; }
    /// Finite part; zero for the infinite element.
    const Rational& value() const noexcept { return value_; }

    friend bool operator==(const TruthValue& a, const TruthValue& b) {
        return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
    }
    friend std::strong_ordering operator<=>(const TruthValue& a, const TruthValue& b) {
        if (a.infinite_ || b.infinite_) {
            return static_cast<int>(a.infinite_) <=> static_cast<int>(b.infinite_);
        }
        if (a.value_ < b.value_) return std::strong_ordering::less;
        if (b.value_ < a.value_) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

private:
    Rational value_{0};
    bool infinite_ = false;
};

/// Accepts "inf" (or "∞") and every form parse_rational accepts.
TruthValue parse_truth(std::string_view text);
std::string to_string(const TruthValue& t);

class Quantale {
public:
    constexpr Quantale() = default;
    constexpr explicit Quantale(Mode mode) : mode_(mode) {}

    constexpr Mode mode() const noexcept { return mode_; }
    constexpr bool bounded() const noexcept { return mode_ == Mode::UnitInterval; }

    TruthValue top() const {
        return bounded() ? TruthValue(1) : TruthValue::infinity();
    }

    /// min(a+b, 1) on [0,1]; a+b with absorbing infinity on [0,inf].
    TruthValue tensor(const TruthValue& a, const TruthValue& b) const;

    /// Clamps a nonnegative value into the carrier.
    TruthValue truncate(const TruthValue& t) const;

    bool contains(const TruthValue& t) const;

    /// |a - b|, the metric of the carrier viewed as a space.
    TruthValue distance(const TruthValue& a, const TruthValue& b) const;

    constexpr friend bool operator==(Quantale, Quantale) = default;

private:
    Mode mode_ = Mode::UnitInterval;
};

} // namespace contsem
