#include "contsem/error.hpp"
#include "contsem/subobject.hpp"
#include "contsem/random.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace contsem;
using oracle::t;

namespace {

/// n points, all pairwise distances 1/2.
SpacePtr uniform_space(const std::string& id, std::size_t n) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back(id + std::to_string(i));
    std::vector<TruthValue> d(n * n, t(1, 2));
    for (std::size_t i = 0; i < n; ++i) d[i * n + i] = t(0);
    return make_space(id, std::move(labels), std::move(d));
}

std::vector<Subobject> all_subsets(const SpacePtr& x) {
    std::vector<Subobject> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << x->size()); ++mask) {
        std::vector<bool> m(x->size());
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = (mask >> i) & 1;
        out.emplace_back(x, std::move(m));
    }
    return out;
}

std::vector<MetricMap> all_maps(const SpacePtr& x, const SpacePtr& y) {
    std::vector<MetricMap> out;
    std::size_t total = 1;
    for (std::size_t i = 0; i < x->size(); ++i) total *= y->size();
    for (std::size_t code = 0; code < total; ++code) {
        std::vector<std::size_t> a(x->size());
        std::size_t c = code;
        for (auto& v : a) {
            v = c % y->size();
            c /= y->size();
        }
        out.emplace_back(x, y, std::move(a));
    }
    return out;
}

Subobject labels(const SpacePtr& x, std::initializer_list<std::string> ls) {
    std::vector<std::string> v(ls);
    return Subobject::of(x, v);
}

} // namespace

TEST_CASE("lattice operations") {
    auto x = make_space("X", {"a", "b", "c"}, std::vector<TruthValue>(9, t(0)));
    CHECK(meet(labels(x, {"a", "b"}), labels(x, {"b", "c"})) == labels(x, {"b"}));
    CHECK(sub_lattice(LatticeOp::Meet, x, {}) == Subobject::full(x));
    CHECK(sub_lattice(LatticeOp::Join, x, {}) == Subobject::empty(x));
    std::vector<Subobject> singles{labels(x, {"a"}), labels(x, {"b"}), labels(x, {"c"})};
    CHECK(sub_lattice(LatticeOp::Join, x, singles) == Subobject::full(x));
    CHECK(labels(x, {"c", "a"}).labels() == std::vector<std::string>{"a", "c"});
    CHECK_THROWS_AS(labels(x, {"z"}), PreconditionError);

    auto y = uniform_space("Y", 3);
    CHECK_THROWS_AS(meet(Subobject::full(x), Subobject::full(y)), PreconditionError);
}

TEST_CASE("pullback, images and implication") {
    auto x = make_space("X", {"a", "b"}, {t(0), t(1, 2), t(1, 2), t(0)});
    auto y = make_space("Y", {"u", "v"}, {t(0), t(1, 2), t(1, 2), t(0)});
    MetricMap collapse(x, y, {0, 0});

    CHECK(pullback_sub(identity_map(y), labels(y, {"v"})) == labels(y, {"v"}));
    CHECK(pullback_sub(MetricMap(x, y, {1, 1}), labels(y, {"u"})) == Subobject::empty(x));
    CHECK(pullback_sub(collapse, labels(y, {"u"})) == Subobject::full(x));

    CHECK(exists_sub(identity_map(x), labels(x, {"a"})) == labels(x, {"a"}));
    CHECK(exists_sub(collapse, Subobject::empty(x)) == Subobject::empty(y));
    CHECK(exists_sub(collapse, labels(x, {"a"})) == labels(y, {"u"}));

    CHECK(forall_sub(collapse, Subobject::full(x)) == Subobject::full(y));
    CHECK(forall_sub(collapse, labels(x, {"a"})) == labels(y, {"v"}));

    // Injective f: image of A plus the points with empty fiber.
    auto z = uniform_space("Z", 3);
    MetricMap inj(x, z, {0, 2});
    for (const Subobject& a : all_subsets(x)) {
        std::vector<bool> expect(3, false);
        std::vector<bool> hit(3, false);
        for (std::size_t i = 0; i < 2; ++i) {
            hit[inj(i)] = true;
            if (a.contains(i)) expect[inj(i)] = true;
        }
        for (std::size_t j = 0; j < 3; ++j) expect[j] = expect[j] || !hit[j];
        CHECK(forall_sub(inj, a) == Subobject(z, expect));
    }

    CHECK(heyting_implies(labels(x, {"a"}), labels(x, {"a"})) == Subobject::full(x));
    CHECK(heyting_implies(Subobject::full(x), labels(x, {"b"})) == labels(x, {"b"}));
    CHECK(heyting_implies(labels(x, {"a"}), Subobject::empty(x)) == labels(x, {"b"}));

    CHECK_THROWS_AS(pullback_sub(collapse, Subobject::full(x)), PreconditionError);
}

TEST_CASE("exhaustive: adjunctions, Frobenius and Heyting at up to 3 points") {
    for (std::size_t nx = 1; nx <= 3; ++nx) {
        for (std::size_t ny = 1; ny <= 3; ++ny) {
            auto x = uniform_space("X", nx);
            auto y = uniform_space("Y", ny);
            auto xs = all_subsets(x);
            auto ys = all_subsets(y);
            for (const MetricMap& f : all_maps(x, y)) {
                for (const Subobject& a : xs) {
                    for (const Subobject& b : ys) {
                        CHECK(leq(exists_sub(f, a), b) == leq(a, pullback_sub(f, b)));
                        CHECK(leq(pullback_sub(f, b), a) == leq(b, forall_sub(f, a)));
                        CHECK(exists_sub(f, meet(a, pullback_sub(f, b))) ==
                              meet(exists_sub(f, a), b));
                    }
                }
            }
            for (const Subobject& a : xs) {
                for (const Subobject& b : xs) {
                    for (const Subobject& c : xs) {
                        CHECK(leq(meet(c, a), b) == leq(c, heyting_implies(a, b)));
                        CHECK(meet(a, join(b, c)) == join(meet(a, b), meet(a, c)));
                    }
                }
            }
        }
    }
}

TEST_CASE("exhaustive: Beck-Chevalley on constructed pullback squares") {
    for (std::size_t n = 1; n <= 3; ++n) {
        auto x = uniform_space("X", n);
        auto y = uniform_space("Y", 2);
        auto z = uniform_space("Z", n == 3 ? 2 : 3);
        for (const MetricMap& f : all_maps(x, y)) {
            for (const MetricMap& g : all_maps(z, y)) {
                PullbackSquare sq = pullback_square(f, g);
                for (const Subobject& a : all_subsets(x)) {
                    // g* exists_f A = exists_{to_right} to_left* A
                    CHECK(pullback_sub(g, exists_sub(f, a)) ==
                          exists_sub(sq.to_right, pullback_sub(sq.to_left, a)));
                }
            }
        }
    }
}

TEST_CASE("r_image factors through an isometric inclusion") {
    gen::Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        auto x = gen::random_space(rng, "X", 1 + gen::uniform(rng, 4), 6, true);
        auto y = gen::random_space(rng, "Y", 1 + gen::uniform(rng, 4), 6, true);
        MetricMap f = gen::random_map(rng, x, y);
        ImageFactorization im = r_image(f);
        CHECK(compose_maps(im.inclusion, im.surjection).assignment().size() == x->size());
        for (std::size_t p = 0; p < x->size(); ++p) CHECK(im.inclusion(im.surjection(p)) == f(p));
        CHECK(is_regular_mono(im.inclusion, Moduloid::E1));
        CHECK(exists_sub(im.surjection, Subobject::full(x)) ==
              Subobject::full(im.surjection.target()));
    }
}
