#include "contsem/error.hpp"
#include "contsem/quantale.hpp"
#include "contsem/random.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace contsem;
using oracle::q;
using oracle::t;

TEST_CASE("rationals parse from fractions and terminating decimals") {
    CHECK(parse_rational("3/4") == q(3, 4));
    CHECK(parse_rational("0.25") == q(1, 4));
    CHECK(parse_rational(" 2 ") == q(2));
    CHECK(parse_rational("6/8") == q(3, 4));
    CHECK(parse_rational(".5") == q(1, 2));
    CHECK(to_string(q(6, 8)) == "3/4");
    CHECK(to_string(q(4, 2)) == "2");
    CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
    CHECK_THROWS_AS(parse_rational("abc"), ParseError);
    CHECK_THROWS_AS(parse_rational("1.2.3"), ParseError);
}

TEST_CASE("tensor on the unit interval") {
    Quantale unit;
    CHECK(unit.tensor(t(4, 10), t(5, 10)) == t(9, 10));
    CHECK(unit.tensor(t(7, 10), t(7, 10)) == t(1));
    CHECK(unit.tensor(t(0), t(3, 7)) == t(3, 7));
    CHECK(unit.top() == t(1));
}

TEST_CASE("tensor on the extended half line absorbs infinity") {
    Quantale ext(Mode::ExtendedNonneg);
    CHECK(ext.tensor(t(7, 10), t(7, 10)) == t(7, 5));
    CHECK(ext.tensor(TruthValue::infinity(), t(1)) == TruthValue::infinity());
    CHECK(ext.top() == TruthValue::infinity());
    CHECK(ext.contains(t(5)));
    CHECK_FALSE(Quantale{}.contains(t(5)));
    CHECK(parse_truth("inf").is_infinite());
    CHECK(to_string(TruthValue::infinity()) == "inf");
}

TEST_CASE("tensor is a commutative monoid, monotone in each argument") {
    gen::Rng rng(11);
    for (Mode mode : {Mode::UnitInterval, Mode::ExtendedNonneg}) {
        Quantale qt(mode);
        long hi = mode == Mode::UnitInterval ? 12 : 30;
        for (int i = 0; i < 500; ++i) {
            TruthValue a(gen::grid_rational(rng, 12, 0, hi));
            TruthValue b(gen::grid_rational(rng, 12, 0, hi));
            TruthValue c(gen::grid_rational(rng, 12, 0, hi));
            CHECK(qt.tensor(a, b) == qt.tensor(b, a));
            CHECK(qt.tensor(qt.tensor(a, b), c) == qt.tensor(a, qt.tensor(b, c)));
            CHECK(qt.tensor(a, TruthValue(0)) == a);
            if (a <= b) CHECK(qt.tensor(a, c) <= qt.tensor(b, c));
        }
    }
}

TEST_CASE("ordering puts infinity on top") {
    CHECK(t(1000) < TruthValue::infinity());
    CHECK(TruthValue::infinity() == TruthValue::infinity());
    CHECK(t(1, 3) < t(1, 2));
}
