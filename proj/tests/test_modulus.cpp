#include "contsem/error.hpp"
#include "contsem/modulus.hpp"
#include "contsem/random.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace contsem;
using oracle::q;
using oracle::t;

namespace {

Modulus half_step() {
    // 0 on [0, 1/2), 3/10 on [1/2, 1].
    return Modulus::step({{q(1, 2), t(3, 10)}});
}

} // namespace

TEST_CASE("apply") {
    CHECK(Modulus::lipschitz(2)(t(3, 10)) == t(3, 5));
    CHECK(Modulus::lipschitz(2)(t(7, 10)) == t(1));
    CHECK(half_step()(t(0)) == t(0));
    CHECK(Modulus::identity()(t(8, 10)) == t(4, 5));
    CHECK(half_step()(t(49, 100)) == t(0));
    CHECK(half_step()(t(1, 2)) == t(3, 10));
    CHECK(half_step()(t(1)) == t(3, 10));
}

TEST_CASE("canonical form truncates at the top and merges collinear pieces") {
    Modulus m = Modulus::lipschitz(4);
    REQUIRE(m.pieces().size() == 2);
    CHECK(m.pieces()[1].breakpoint == q(1, 4));
    CHECK(m.pieces()[1].intercept == t(1));
    CHECK(m.pieces()[1].slope == 0);

    Modulus split = Modulus::from_pieces(
        {Piece{q(0), t(0), q(1)}, Piece{q(1, 3), t(1, 3), q(1)}, Piece{q(1, 2), t(1, 2), q(1)}});
    CHECK(split == Modulus::identity());
}

TEST_CASE("from_pieces rejects non-moduli") {
    CHECK_THROWS_AS(Modulus::from_pieces({Piece{q(0), t(1, 10), q(1)}}), PreconditionError);
    CHECK_THROWS_AS(Modulus::from_pieces({Piece{q(1, 10), t(0), q(1)}}), PreconditionError);
    CHECK_THROWS_AS(Modulus::from_pieces({Piece{q(0), t(0), q(-1)}}), PreconditionError);
    // Decreasing jump.
    CHECK_THROWS_AS(Modulus::from_pieces({Piece{q(0), t(0), q(1)}, Piece{q(1, 2), t(1, 4), q(0)}}),
                    PreconditionError);
    CHECK_THROWS_AS(Modulus::from_pieces({Piece{q(0), t(0), q(1)}, Piece{q(2), t(1), q(0)}}),
                    PreconditionError);
}

TEST_CASE("compose") {
    CHECK(compose(Modulus::lipschitz(2), Modulus::lipschitz(3)) == Modulus::lipschitz(6));
    Modulus e = half_step();
    CHECK(compose(Modulus::identity(), e) == e);
    CHECK(compose(e, Modulus::identity()) == e);

    // Frozen from pointwise evaluation of step(2r) on a dense grid.
    Modulus composed = compose(e, Modulus::lipschitz(2));
    auto pointwise = [&](const TruthValue& r) { return e(Modulus::lipschitz(2)(r)); };
    REQUIRE(oracle::agree_on_grid(pointwise, [&](const TruthValue& r) { return composed(r); }, 400));
    CHECK(composed == Modulus::step({{q(1, 4), t(3, 10)}}));
}

TEST_CASE("combine") {
    Modulus id = Modulus::identity();
    CHECK(combine(Combine::Max, Modulus::lipschitz(2), Modulus::lipschitz(3)) ==
          Modulus::lipschitz(3));
    CHECK(combine(Combine::Add, id, id) == Modulus::lipschitz(2));
    Modulus e = half_step();
    CHECK(combine(Combine::Max, e, e) == e);

    // max(id, step) crosses: id below 3/10 then the step wins on [1/2, ...)? No:
    // at 1/2 id is 1/2 > 3/10, so the max is id everywhere.
    CHECK(combine(Combine::Max, id, e) == id);
    // max(lip:1/2 shape, step) genuinely crosses at 3/5.
    Modulus slow = Modulus::from_pieces({Piece{q(0), t(0), q(1, 2)}});
    Modulus m = combine(Combine::Max, slow, e);
    auto expected = [&](const TruthValue& r) { return std::max(slow(r), e(r)); };
    CHECK(oracle::agree_on_grid(expected, [&](const TruthValue& r) { return m(r); }, 600));
    CHECK(m(t(3, 5)) == t(3, 10));
}

TEST_CASE("leq") {
    CHECK(leq(Modulus::lipschitz(2), Modulus::lipschitz(3)));
    CHECK_FALSE(leq(Modulus::lipschitz(3), Modulus::lipschitz(2)));
    CHECK(leq(half_step(), half_step()));
    CHECK(leq(Modulus::zero(), half_step()));
    CHECK(leq(half_step(), Modulus::identity()));
    // The step exceeds r -> r/2 just right of 1/2.
    Modulus slow = Modulus::from_pieces({Piece{q(0), t(0), q(1, 2)}});
    CHECK_FALSE(leq(half_step(), slow));
}

TEST_CASE("moduloids") {
    CHECK(contains(Moduloid::E1, Modulus::identity()));
    CHECK_FALSE(contains(Moduloid::E1, Modulus::lipschitz(2)));
    CHECK(contains(Moduloid::EL, Modulus::lipschitz(q(5, 2))));
    CHECK(contains(Moduloid::EL, Modulus::identity()));
    CHECK_FALSE(contains(Moduloid::EL, half_step()));
    CHECK_FALSE(contains(Moduloid::EL, Modulus::zero()));
    CHECK(contains(Moduloid::EuPL, half_step()));
    CHECK_FALSE(tensor_closed(Moduloid::E1));
    CHECK(tensor_closed(Moduloid::EL));

    CHECK(least_member_above(Moduloid::EL, Modulus::zero()) == Modulus::identity());
    CHECK(least_member_above(Moduloid::E1, Modulus::zero()) == Modulus::identity());
    // 3/10 reached at 1/2: ratio 3/5 < 1, so K = 1.
    CHECK(least_member_above(Moduloid::EL, half_step()) == Modulus::identity());
    CHECK(least_member_above(Moduloid::EL, Modulus::step({{q(1, 10), t(1, 2)}})) ==
          Modulus::lipschitz(5));
    CHECK_THROWS_AS(least_member_above(Moduloid::E1, Modulus::lipschitz(2)), PreconditionError);
}

TEST_CASE("extended mode moduli") {
    Quantale ext(Mode::ExtendedNonneg);
    Modulus k3 = Modulus::lipschitz(3, ext);
    CHECK(k3(t(2)) == t(6));
    CHECK(k3(TruthValue::infinity()).is_infinite());
    Modulus capped = Modulus::from_pieces({Piece{q(0), t(0), q(1)}, Piece{q(2), t(2), q(0)}}, ext);
    CHECK(capped(t(100)) == t(2));
    CHECK(capped(TruthValue::infinity()) == t(2));
    Modulus blowup = Modulus::from_pieces(
        {Piece{q(0), t(0), q(1)}, Piece{q(5), TruthValue::infinity(), q(0)}}, ext);
    CHECK(blowup(t(5)).is_infinite());
    CHECK(compose(Modulus::lipschitz(2, ext), blowup)(t(4)) == t(8));
    CHECK(compose(Modulus::lipschitz(2, ext), blowup)(t(5)).is_infinite());
    CHECK(leq(capped, k3));
    CHECK_FALSE(leq(k3, capped));
    CHECK(leq(k3, blowup) == false);
    CHECK(leq(capped, blowup));
    CHECK(combine(Combine::Add, capped, capped)(t(10)) == t(4));
}

TEST_CASE("property: compose is associative with identity, pointwise") {
    gen::Rng rng(3);
    for (int i = 0; i < 150; ++i) {
        Modulus a = gen::random_modulus(rng, 8);
        Modulus b = gen::random_modulus(rng, 8);
        Modulus c = gen::random_modulus(rng, 8);
        Modulus left = compose(compose(a, b), c);
        Modulus right = compose(a, compose(b, c));
        CHECK(left == right);
        CHECK(compose(a, Modulus::identity()) == a);
        CHECK(compose(Modulus::identity(), a) == a);
        for (int k = 0; k < 20; ++k) {
            TruthValue r(gen::grid_rational(rng, 97, 0, 97));
            CHECK(left(r) == a(b(c(r))));
        }
    }
}

TEST_CASE("property: combine and leq agree with pointwise evaluation") {
    gen::Rng rng(5);
    for (int i = 0; i < 150; ++i) {
        Modulus a = gen::random_modulus(rng, 6);
        Modulus b = gen::random_modulus(rng, 6);
        Modulus mx = combine(Combine::Max, a, b);
        Modulus sum = combine(Combine::Add, a, b);
        Quantale unit;
        bool pointwise_leq = true;
        for (const TruthValue& r : oracle::grid_points(360, 360)) {
            CHECK(mx(r) == std::max(a(r), b(r)));
            CHECK(sum(r) == unit.tensor(a(r), b(r)));
            if (a(r) > b(r)) pointwise_leq = false;
        }
        // The grid holds every breakpoint and crossing of these generators
        // only approximately, so leq may refute what the grid misses but
        // never the other way round.
        if (leq(a, b)) CHECK(pointwise_leq);
        CHECK(leq(a, mx));
        CHECK(leq(b, mx));
        CHECK(leq(mx, sum));
    }
}

TEST_CASE("property: Lipschitz moduli stay Lipschitz under add") {
    gen::Rng rng(9);
    for (int i = 0; i < 100; ++i) {
        Rational k1 = gen::grid_rational(rng, 4, 4, 40);
        Rational k2 = gen::grid_rational(rng, 4, 4, 40);
        Modulus s = combine(Combine::Add, Modulus::lipschitz(k1), Modulus::lipschitz(k2));
        CHECK(contains(Moduloid::EL, s));
        CHECK(s == Modulus::lipschitz(k1 + k2));
    }
}

TEST_CASE("property: every modulus is right-continuous and preserves finite infima") {
    gen::Rng rng(21);
    for (int i = 0; i < 100; ++i) {
        Modulus m = gen::random_modulus(rng, 8);
        Rational max_slope = 0;
        for (const Piece& p : m.pieces()) max_slope = std::max(max_slope, p.slope);
        const auto& ps = m.pieces();
        for (std::size_t pi = 0; pi < ps.size(); ++pi) {
            const Piece& p = ps[pi];
            Rational next = pi + 1 < ps.size() ? ps[pi + 1].breakpoint : Rational(2);
            TruthValue at = m(TruthValue(p.breakpoint));
            CHECK(at == p.intercept);
            for (int k = 1; k <= 6; ++k) {
                Rational delta = Rational(1) / Rational(1 << (3 * k));
                Rational right = p.breakpoint + delta;
                if (right > 1 || right >= next) continue;
                TruthValue v = m(TruthValue(right));
                CHECK(v >= at);
                CHECK(v <= TruthValue(at.value() + max_slope * delta));
            }
        }
        for (int k = 0; k < 10; ++k) {
            TruthValue a(gen::grid_rational(rng, 50, 0, 50));
            TruthValue b(gen::grid_rational(rng, 50, 0, 50));
            CHECK(m(std::min(a, b)) == std::min(m(a), m(b)));
        }
    }
}

TEST_CASE("spec strings") {
    CHECK(parse_modulus_spec("id") == Modulus::identity());
    CHECK(parse_modulus_spec("lip:2") == Modulus::lipschitz(2));
    CHECK(parse_modulus_spec("step:1/2=0.3") == half_step());
    CHECK(to_string(Modulus::lipschitz(2)) == "lip:2");
    CHECK(to_string(half_step()) == "[(0, 0, 0), (1/2, 3/10, 0)]");
    CHECK_THROWS_AS(parse_modulus_spec("bogus"), ParseError);
}
