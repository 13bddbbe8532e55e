#include "contsem/error.hpp"
#include "contsem/quantifier.hpp"
#include "contsem/random.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace contsem;
using oracle::t;

namespace {

SpacePtr pair_space(const std::string& id, TruthValue d, std::string a, std::string b) {
    return make_space(id, {std::move(a), std::move(b)}, {t(0), d, d, t(0)});
}

std::vector<TruthValue> as_vec(const Predicate& p) { return {p.values().begin(), p.values().end()}; }

struct Example {
    SpacePtr y = pair_space("Y", t(3, 5), "y1", "y2");
    SpacePtr x = pair_space("X", t(3, 10), "x1", "x2");
    SpacePtr yx = product(y, x);
    MetricMap pi = projection_map(yx, 1);
    Predicate r{yx, {t(1, 5), t(1, 2), t(2, 5), t(1, 10)}, Modulus::identity()};
};

} // namespace

TEST_CASE("forall_proj and quantify_direct on the two-by-two example") {
    Example ex;
    std::vector<TruthValue> sups{t(2, 5), t(1, 2)};
    std::vector<TruthValue> infs{t(1, 5), t(1, 10)};
    CHECK(as_vec(forall_proj(ex.pi, ex.r)) == sups);
    CHECK(as_vec(quantify_direct(Quantifier::Sup, ex.pi, ex.r)) == sups);
    CHECK(oracle::bellman_ford_envelope(*ex.x, sups, Modulus::identity()) == sups);
    CHECK(as_vec(quantify_direct(Quantifier::Inf, ex.pi, ex.r)) == infs);
    CHECK(exists_along(ex.pi, ex.r) == quantify_direct(Quantifier::Inf, ex.pi, ex.r));

    Predicate zero(ex.yx, std::vector<TruthValue>(4, t(0)), Modulus::identity());
    CHECK(as_vec(forall_proj(ex.pi, zero)) == std::vector<TruthValue>(2, t(0)));
}

TEST_CASE("singleton index reindexes") {
    auto x = pair_space("X", t(3, 10), "x1", "x2");
    auto one_x = product(terminal_space(), x);
    MetricMap pi = projection_map(one_x, 1);
    Predicate r(one_x, {t(1, 5), t(2, 5)}, Modulus::identity());
    std::vector<TruthValue> expect{t(1, 5), t(2, 5)};
    CHECK(as_vec(forall_proj(pi, r)) == expect);
    CHECK(as_vec(quantify_direct(Quantifier::Inf, pi, r)) == expect);
    CHECK(as_vec(quantify_direct(Quantifier::Sup, pi, r)) == expect);
}

TEST_CASE("exists_along") {
    auto x = pair_space("X", t(1, 2), "a", "b");
    Predicate r(x, {t(3, 10), t(7, 10)}, Modulus::identity());
    CHECK(exists_along(identity_map(x), r) == r);

    auto u = make_space("U", {"u"}, {t(0)});
    MetricMap collapse(x, u, {0, 0}, Modulus::identity());
    CHECK(exists_along(collapse, r).value(0) == t(3, 10));

    // v has an empty fiber and sits at distance 1 from everything.
    auto uv = pair_space("UV", t(1), "u", "v");
    MetricMap into(x, uv, {0, 0}, Modulus::identity());
    Predicate e = exists_along(into, r, Modulus::identity());
    CHECK(e.value(0) == t(3, 10));
    CHECK(e.value(1) == t(1));
    IndexedFamily raw = raw_exists(into, r);
    CHECK(raw.threshold(1) == t(1));
    CHECK_FALSE(raw.attained(1));

    MetricMap steep(x, uv, {0, 1}, Modulus::lipschitz(2));
    CHECK_THROWS_WITH_AS(exists_along(steep, Predicate(x, {t(0), t(1)}, Modulus::lipschitz(2)),
                                      Modulus::zero()),
                         doctest::Contains("modulus mismatch"), PreconditionError);
    CHECK_THROWS_AS(exists_along(identity_map(uv), r), PreconditionError);
}

TEST_CASE("empty index factor") {
    auto empty = make_space("E", {}, {});
    auto x = pair_space("X", t(3, 10), "x1", "x2");
    auto ex = product(empty, x);
    MetricMap pi = projection_map(ex, 1);
    Predicate r(ex, {}, Modulus::identity());
    CHECK_THROWS_WITH_AS(forall_proj(pi, r), "forall requires inhabited factor", PreconditionError);
    CHECK_THROWS_AS(quantify_direct(Quantifier::Sup, pi, r), PreconditionError);
    CHECK(as_vec(quantify_direct(Quantifier::Inf, pi, r)) == std::vector<TruthValue>(2, t(1)));
    CHECK(as_vec(exists_along(pi, r)) == std::vector<TruthValue>(2, t(1)));
}

TEST_CASE("property: direct quantifiers agree with the adjoints") {
    gen::Rng rng(41);
    for (int trial = 0; trial < 300; ++trial) {
        auto y = gen::random_space(rng, "Y", 1 + gen::uniform(rng, 4), 8, gen::coin(rng));
        auto x = gen::random_space(rng, "X", 1 + gen::uniform(rng, 4), 8, gen::coin(rng));
        bool y_first = gen::coin(rng);
        auto p = y_first ? product(y, x) : product(x, y);
        MetricMap pi = projection_map(p, y_first ? 1 : 0);
        Modulus eps = gen::random_modulus(rng, 8);
        Predicate r = gen::random_predicate(rng, p, eps, 8);

        Predicate inf = quantify_direct(Quantifier::Inf, pi, r);
        Predicate sup = quantify_direct(Quantifier::Sup, pi, r);
        CHECK(inf == exists_along(pi, r, eps));
        CHECK(sup == forall_proj(pi, r));
        CHECK(is_epsilon_predicate(to_family(inf), eps));
        CHECK(is_epsilon_predicate(to_family(sup), eps));
    }
}

TEST_CASE("property: adjunctions along projections and general maps") {
    gen::Rng rng(43);
    for (int trial = 0; trial < 60; ++trial) {
        auto y = gen::random_space(rng, "Y", 1 + gen::uniform(rng, 2), 4, true);
        auto x = gen::random_space(rng, "X", 1 + gen::uniform(rng, 3), 4, true);
        auto yx = product(y, x);
        MetricMap pi = projection_map(yx, 1);
        Modulus eps = gen::random_grid_modulus(rng);
        std::vector<Predicate> on_x;
        std::vector<Predicate> on_yx;
        for (int k = 0; k < 12; ++k) {
            on_x.push_back(gen::random_predicate(rng, x, eps, 4));
            on_yx.push_back(gen::random_predicate(rng, yx, eps, 4));
        }
        for (const Predicate& r : on_yx) {
            Predicate ex = exists_along(pi, r, eps);
            Predicate fa = forall_proj(pi, r);
            for (const Predicate& p : on_x) {
                Predicate pb = predicate_pullback(pi, p);
                CHECK(leq(ex, p) == leq(r, pb));
                CHECK(leq(pb, r) == leq(p, fa));
            }
        }

        // exists along an arbitrary map with identity modulus.
        auto z = gen::random_space(rng, "Z", 1 + gen::uniform(rng, 3), 4, true);
        MetricMap f = gen::random_map(rng, x, z);
        if (f.modulus() == Modulus::identity() || leq(f.modulus(), Modulus::identity())) {
            MetricMap fid(x, z, {f.assignment().begin(), f.assignment().end()}, Modulus::identity());
            for (const Predicate& r : on_x) {
                Predicate ex = exists_along(fid, r, eps);
                for (int k = 0; k < 8; ++k) {
                    Predicate p = gen::random_predicate(rng, z, eps, 4);
                    CHECK(leq(ex, p) == leq(r, predicate_pullback(fid, p)));
                }
            }
        }
    }
}
