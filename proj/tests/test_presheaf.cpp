#include "contsem/error.hpp"
#include "contsem/presheaf.hpp"
#include "contsem/random.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace contsem;
using oracle::t;

namespace {

using Values = std::vector<std::vector<TruthValue>>;

CategoryPtr arrow_category() { return make_category({"a", "b"}, {{"f", "b", "a"}}, {}); }

CategoryPtr one_object() { return make_category({"a"}, {}, {}); }

SpacePtr two(const std::string& id, TruthValue d, std::string x, std::string y) {
    return make_space(id, {std::move(x), std::move(y)}, {t(0), d, d, t(0)});
}

/// Fa = {p, q} at distance 1/2, Fb = {u}.
PresheafPtr worked_presheaf() {
    auto c = arrow_category();
    auto fa = two("Fa", t(1, 2), "p", "q");
    auto fb = make_space("Fb", {"u"}, {t(0)});
    std::vector<std::vector<std::size_t>> r(c->morphism_count());
    r[*c->morphism_index("f")] = {0, 0};
    return make_presheaf(c, {fa, fb}, std::move(r));
}

std::vector<std::vector<std::vector<bool>>> all_member_sets(const MetricPresheaf& f) {
    std::vector<std::vector<std::vector<bool>>> out{{}};
    for (const SpacePtr& s : f.spaces()) {
        std::vector<std::vector<std::vector<bool>>> next;
        for (const auto& partial : out) {
            for (std::size_t mask = 0; mask < (std::size_t{1} << s->size()); ++mask) {
                auto m = partial;
                std::vector<bool> row(s->size());
                for (std::size_t i = 0; i < row.size(); ++i) row[i] = (mask >> i) & 1;
                m.push_back(std::move(row));
                next.push_back(std::move(m));
            }
        }
        out = std::move(next);
    }
    return out;
}

} // namespace

TEST_CASE("categories") {
    auto c = arrow_category();
    CHECK(c->morphism_count() == 3);
    std::size_t f = *c->morphism_index("f");
    CHECK(c->compose(c->identity(0), f) == f);
    CHECK(c->compose(f, c->identity(1)) == f);
    CHECK_FALSE(c->compose(f, f));
    CHECK(c->morphisms_into(0).size() == 2);

    CHECK_THROWS_AS(make_category({"a"}, {{"f", "a", "z"}}, {}), PreconditionError);
    CHECK_THROWS_AS(make_category({"a"}, {{"e", "a", "a"}}, {}), PreconditionError); // e.e missing
    CHECK_THROWS_AS(make_category({"a"}, {{"e", "a", "a"}}, {{"e", "e", "e"}, {"e", "e", "1_a"}}),
                    PreconditionError);
    // (x.y).z vs x.(y.z) in a table that is total but not associative.
    CHECK_THROWS_WITH_AS(
        make_category({"a"}, {{"x", "a", "a"}, {"y", "a", "a"}},
                      {{"x", "x", "y"}, {"x", "y", "x"}, {"y", "x", "x"}, {"y", "y", "x"}}),
        doctest::Contains("associative"), PreconditionError);
}

TEST_CASE("validate_presheaf") {
    auto one = one_object();
    CHECK_FALSE(validate_presheaf(*terminal_presheaf(one)));
    CHECK_FALSE(validate_presheaf(*worked_presheaf()));

    auto c = arrow_category();
    auto near = two("N", t(1, 5), "p", "q");
    auto far = two("W", t(2, 5), "u", "v");
    std::vector<std::vector<std::size_t>> r(c->morphism_count());
    r[*c->morphism_index("f")] = {0, 1};
    MetricPresheaf stretch(c, {near, far}, r);
    auto v = validate_presheaf(stretch);
    REQUIRE(v);
    CHECK(v->axiom == "lipschitz");

    auto idem = make_category({"a"}, {{"e", "a", "a"}}, {{"e", "e", "e"}});
    auto s = two("S", t(1, 2), "p", "q");
    std::vector<std::vector<std::size_t>> swap(idem->morphism_count());
    swap[*idem->morphism_index("e")] = {1, 0};
    auto w = validate_presheaf(MetricPresheaf(idem, {s}, swap));
    REQUIRE(w);
    CHECK(w->axiom == "functoriality");
}

TEST_CASE("presheaf subobjects") {
    auto f = worked_presheaf();
    CHECK(is_presheaf_sub(*f, PresheafSub::full(f).members()));
    CHECK_FALSE(is_presheaf_sub(*f, {{true, false}, {false}}));
    CHECK(is_presheaf_sub(*f, {{false, false}, {true}}));

    PresheafSub p(f, {{true, false}, {true}});
    PresheafSub q(f, {{false, true}, {true}});
    const PresheafSub pf[] = {p, PresheafSub::full(f)};
    CHECK(presheaf_sub_lattice(LatticeOp::Meet, f, pf) == p);
    const PresheafSub pq[] = {p, q};
    CHECK(presheaf_sub_lattice(LatticeOp::Join, f, pq) == PresheafSub::full(f));
    CHECK(presheaf_sub_lattice(LatticeOp::Meet, f, pq) == PresheafSub(f, {{false, false}, {true}}));
    CHECK(leq(p, PresheafSub::full(f)));
    CHECK_FALSE(leq(p, q));
}

TEST_CASE("regular monos and r-images") {
    auto f = worked_presheaf();
    auto c = f->category();
    // Sub presheaf on {p}, {u} and its isometric inclusion.
    auto sa = make_space("Sa", {"p"}, {t(0)});
    auto sb = make_space("Sb", {"u"}, {t(0)});
    std::vector<std::vector<std::size_t>> r(c->morphism_count());
    r[*c->morphism_index("f")] = {0};
    auto s = make_presheaf(c, {sa, sb}, r);
    NaturalTransformation incl{s, f, {{0}, {0}}};
    CHECK(is_regular_mono_presheaf(incl));
    CHECK(presheaf_rimage(incl) == PresheafSub(f, {{true, false}, {true}}));

    CHECK(presheaf_rimage(identity_natural(f)) == PresheafSub::full(f));

    NaturalTransformation collapse{f, s, {{0, 0}, {0}}};
    CHECK_FALSE(is_regular_mono_presheaf(collapse));
    CHECK(presheaf_rimage(collapse) == PresheafSub::full(s));

    NaturalTransformation to_q{s, f, {{1}, {0}}};
    CHECK(presheaf_rimage(to_q) == PresheafSub(f, {{false, true}, {true}}));

    NaturalTransformation swap{f, f, {{1, 0}, {0}}};
    CHECK_FALSE(validate_natural(swap));
    auto g = make_presheaf(c, {f->at(0), two("Gb", t(1, 2), "u", "v")},
                           [&] {
                               std::vector<std::vector<std::size_t>> rr(c->morphism_count());
                               rr[*c->morphism_index("f")] = {0, 1};
                               return rr;
                           }());
    NaturalTransformation unnatural{f, g, {{0, 1}, {1}}};
    REQUIRE(validate_natural(unnatural));
    CHECK(validate_natural(unnatural)->axiom == "naturality");
    CHECK_THROWS_AS(presheaf_rimage(unnatural), PreconditionError);
}

TEST_CASE("products and the presheaf distance") {
    auto f = worked_presheaf();
    auto one = terminal_presheaf(f->category());
    auto f1 = presheaf_product(f, one);
    CHECK_FALSE(validate_presheaf(*f1));
    CHECK(f1->at(0)->distances()[1] == f->at(0)->distances()[1]);
    CHECK(f1->restriction(*f->category()->morphism_index("f")) ==
          f->restriction(*f->category()->morphism_index("f")));

    auto ff = presheaf_product(f, f);
    PresheafSub d0 = presheaf_distance(ff, t(0));
    for (std::size_t a = 0; a < 2; ++a) {
        std::size_t n = f->at(a)->size();
        for (std::size_t x = 0; x < n; ++x) CHECK(d0.contains(a, x * n + x));
    }
    CHECK_FALSE(d0.contains(0, 1));
    CHECK(presheaf_distance(ff, t(1, 2)) == PresheafSub::full(ff));

    gen::Rng rng(3);
    for (int i = 0; i < 40; ++i) {
        auto rc = gen::random_category(rng);
        auto g = gen::random_presheaf(rng, rc, 3, 4);
        auto gg = presheaf_product(g, g);
        CHECK_FALSE(validate_presheaf(*gg));
        for (long k = 0; k <= 4; ++k) CHECK_NOTHROW(presheaf_distance(gg, t(k, 4)));
    }
}

TEST_CASE("presheaf predicates") {
    auto f = worked_presheaf();
    CHECK(is_presheaf_predicate(*f, Values{{t(0), t(0)}, {t(0)}}));
    CHECK_FALSE(is_presheaf_predicate(*f, Values{{t(0), t(0)}, {t(1, 4)}}));
    CHECK(presheaf_predicate_violation(*f, Values{{t(0), t(0)}, {t(1, 4)}})->axiom == "monotone");
    CHECK(is_presheaf_predicate(*f, Values{{t(1, 5), t(3, 5)}, {t(1, 10)}}));
    CHECK_FALSE(is_presheaf_predicate(*f, Values{{t(0), t(3, 5)}, {t(0)}}));
}

TEST_CASE("truth values over an object") {
    auto one = one_object();
    Quantale q;
    OmegaElement x{one, 0, {t(1, 5)}};
    OmegaElement y{one, 0, {t(7, 10)}};
    CHECK(omega_distance(x, y, q) == t(1, 2));
    CHECK(omega_nu(x) == t(1, 5));
    CHECK(omega_restrict(one->identity(0), x) == x);

    auto c = arrow_category();
    std::size_t f = *c->morphism_index("f");
    std::size_t id_a = c->identity(0);
    OmegaElement bad{c, 0, {}};
    bad.theta.resize(2);
    bad.theta[c->position_into(id_a)] = t(1, 5);
    bad.theta[c->position_into(f)] = t(1, 2);
    CHECK_THROWS_AS(validate_omega(bad), PreconditionError);

    // Pseudometric and non-expansive restriction over grid-1/4 elements.
    std::vector<OmegaElement> at_a;
    for (long i = 0; i <= 4; ++i) {
        for (long j = 0; j <= i; ++j) {
            OmegaElement s{c, 0, {t(0), t(0)}};
            s.theta[c->position_into(id_a)] = t(i, 4);
            s.theta[c->position_into(f)] = t(j, 4);
            validate_omega(s);
            at_a.push_back(s);
        }
    }
    for (const auto& s1 : at_a) {
        CHECK(omega_distance(s1, s1, q) == t(0));
        for (const auto& s2 : at_a) {
            CHECK(omega_distance(s1, s2, q) == omega_distance(s2, s1, q));
            CHECK(omega_distance(omega_restrict(f, s1), omega_restrict(f, s2), q) <=
                  omega_distance(s1, s2, q));
            for (const auto& s3 : at_a) {
                CHECK(omega_distance(s1, s3, q) <=
                      q.tensor(omega_distance(s1, s2, q), omega_distance(s2, s3, q)));
            }
        }
    }
}

TEST_CASE("classification on the arrow category") {
    auto f = worked_presheaf();
    auto c = f->category();
    std::size_t arrow = *c->morphism_index("f");
    PresheafPredicate r(f, Values{{t(1, 5), t(3, 5)}, {t(1, 10)}});
    Classification phi = classify_presheaf(r);
    CHECK(phi[0][0].at(c->identity(0)) == t(1, 5));
    CHECK(phi[0][0].at(arrow) == t(1, 10));
    CHECK(phi[0][1].at(c->identity(0)) == t(3, 5));
    CHECK(phi[0][1].at(arrow) == t(1, 10));
    CHECK(omega_distance(phi[0][0], phi[0][1], f->quantale()) == t(2, 5));
    CHECK_FALSE(validate_classification(*f, phi));
    CHECK(pullback_truth(f, phi) == r);

    PresheafPredicate zero(f, Values{{t(0), t(0)}, {t(0)}});
    for (const auto& row : classify_presheaf(zero)) {
        for (const auto& s : row) {
            for (const auto& v : s.theta) CHECK(v == t(0));
        }
    }
    CHECK(pullback_truth(f, classify_presheaf(zero)) == zero);

    // Perturb a single threshold: something must break.
    for (std::size_t a = 0; a < phi.size(); ++a) {
        for (std::size_t x = 0; x < phi[a].size(); ++x) {
            for (std::size_t k = 0; k < phi[a][x].theta.size(); ++k) {
                for (long g = 0; g <= 4; ++g) {
                    if (t(g, 4) == phi[a][x].theta[k]) continue;
                    Classification other = phi;
                    other[a][x].theta[k] = t(g, 4);
                    bool broken = validate_classification(*f, other).has_value() ||
                                  !(pullback_truth(f, other) == r);
                    CHECK(broken);
                }
            }
        }
    }
}

TEST_CASE("one-object classification is the value function") {
    auto one = one_object();
    auto x = two("X", t(1, 2), "p", "q");
    auto f = make_presheaf(one, {x}, {});
    PresheafPredicate r(f, Values{{t(1, 4), t(1, 2)}});
    Classification phi = classify_presheaf(r);
    CHECK(phi[0][0].theta == std::vector<TruthValue>{t(1, 4)});
    CHECK(phi[0][1].theta == std::vector<TruthValue>{t(1, 2)});
}

TEST_CASE("presheaf quantifiers") {
    // G: Ga = {g}, Gb = {h1, h2} with d = 1; restriction hits h1 only.
    auto c = arrow_category();
    auto ga = make_space("Ga", {"g"}, {t(0)});
    auto gb = two("Gb", t(1), "h1", "h2");
    std::vector<std::vector<std::size_t>> r(c->morphism_count());
    r[*c->morphism_index("f")] = {0};
    auto g = make_presheaf(c, {ga, gb}, r);
    auto one = terminal_presheaf(c);
    auto g1 = presheaf_product(g, one);
    NaturalTransformation pi = presheaf_projection(g1, 1);
    PresheafPredicate rr(g1, Values{{t(0)}, {t(0), t(1)}});

    PresheafPredicate fa = presheaf_forall(pi, rr);
    CHECK(fa.values() == Values{{t(1)}, {t(1)}});

    // The sup-then-greatest-minorant recipe is not right adjoint here.
    PresheafPredicate recipe = presheaf_envelope(one, Values{{t(0)}, {t(1)}});
    CHECK(recipe.values() == Values{{t(0)}, {t(0)}});
    PresheafPredicate p(one, Values{{t(0)}, {t(0)}});
    bool lhs = leq(presheaf_predicate_pullback(pi, p), rr);
    CHECK_FALSE(lhs);
    CHECK(leq(p, recipe));
    CHECK(leq(p, fa) == lhs);

    PresheafPredicate ex = presheaf_exists(pi, rr);
    CHECK(ex.values() == Values{{t(0)}, {t(0)}});
}

TEST_CASE("property: classifier round trip and uniqueness") {
    gen::Rng rng(57);
    for (int i = 0; i < 60; ++i) {
        auto rc = gen::random_category(rng);
        auto f = gen::random_presheaf(rng, rc, 4, 4);
        REQUIRE_FALSE(validate_presheaf(*f));
        PresheafPredicate r = gen::random_presheaf_predicate(rng, f, 4);
        Classification phi = classify_presheaf(r);
        CHECK_FALSE(validate_classification(*f, phi));
        PresheafPredicate back = pullback_truth(f, phi);
        CHECK(back == r);
        CHECK(classify_presheaf(back) == phi);

        // Theta values are forced: theta(f) = nu(restrict(f, phi)) = R(F f x).
        const FinCategory& c = *f->category();
        for (std::size_t a = 0; a < c.object_count(); ++a) {
            for (std::size_t x = 0; x < f->at(a)->size(); ++x) {
                for (std::size_t m : c.morphisms_into(a)) {
                    CHECK(omega_nu(omega_restrict(m, phi[a][x])) ==
                          r.value(c.arrow(m).source, f->restrict(m, x)));
                }
            }
        }
    }
}

TEST_CASE("property: presheaf adjunctions, lattices and r-images") {
    gen::Rng rng(61);
    for (int i = 0; i < 40; ++i) {
        auto rc = gen::random_category(rng);
        auto f = gen::random_presheaf(rng, rc, 2, 4);
        auto g = gen::random_presheaf(rng, rc, 2, 4);
        auto fg = presheaf_product(f, g);
        NaturalTransformation pi = presheaf_projection(fg, 1);
        REQUIRE_FALSE(validate_natural(pi));

        std::vector<PresheafPredicate> on_fg;
        std::vector<PresheafPredicate> on_g;
        for (int k = 0; k < 8; ++k) {
            on_fg.push_back(gen::random_presheaf_predicate(rng, fg, 4));
            on_g.push_back(gen::random_presheaf_predicate(rng, g, 4));
        }
        for (const auto& r : on_fg) {
            PresheafPredicate ex = presheaf_exists(pi, r);
            PresheafPredicate fa = presheaf_forall(pi, r);
            for (const auto& p : on_g) {
                PresheafPredicate pb = presheaf_predicate_pullback(pi, p);
                CHECK(leq(ex, p) == leq(r, pb));
                CHECK(leq(pb, r) == leq(p, fa));
            }
        }

        // Sub lattice: pullback preserves meets and joins.
        std::vector<PresheafSub> subs;
        for (const auto& m : all_member_sets(*g)) {
            if (is_presheaf_sub(*g, m)) subs.emplace_back(g, m);
        }
        for (const auto& s1 : subs) {
            for (const auto& s2 : subs) {
                const PresheafSub pair[] = {s1, s2};
                const PresheafSub pulled[] = {presheaf_pullback_sub(pi, s1),
                                              presheaf_pullback_sub(pi, s2)};
                for (LatticeOp op : {LatticeOp::Meet, LatticeOp::Join}) {
                    CHECK(presheaf_pullback_sub(pi, presheaf_sub_lattice(op, g, pair)) ==
                          presheaf_sub_lattice(op, fg, pulled));
                }
            }
        }

        // r-image of a random natural map is least among subs it factors through.
        NaturalTransformation phi{f, g, {}};
        bool found = false;
        for (int attempt = 0; attempt < 30 && !found; ++attempt) {
            phi.components.clear();
            for (std::size_t a = 0; a < f->spaces().size(); ++a) {
                std::vector<std::size_t> comp(f->at(a)->size());
                for (auto& y : comp) y = gen::uniform(rng, g->at(a)->size());
                phi.components.push_back(std::move(comp));
            }
            found = !validate_natural(phi);
        }
        if (!found) continue;
        PresheafSub im = presheaf_rimage(phi);
        for (const auto& s : subs) {
            bool through = true;
            for (std::size_t a = 0; a < phi.components.size(); ++a) {
                for (std::size_t y : phi.components[a]) through = through && s.contains(a, y);
            }
            CHECK(through == leq(im, s));
        }
    }
}
