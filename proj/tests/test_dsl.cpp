#include "contsem/dsl.hpp"
#include "contsem/error.hpp"
#include "contsem/laws.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <string>

using namespace contsem;
using namespace contsem::dsl;
using oracle::q;
using oracle::t;

namespace {

/// Y = grid(2) with c at 0; X = {a, b} at 1/4; g: X -> Y declared lip 2;
/// P the truth predicate on Y.
Signature example_signature() {
    Signature sig;
    SpacePtr y = make_grid(2);
    SpacePtr x = make_space("X", {"a", "b"}, {t(0), t(1, 4), t(1, 4), t(0)});
    sig.spaces = {{"Y", y}, {"X", x}};
    sig.constants = {{"c", {y, 0}}, {"a", {x, 0}}};
    sig.maps.emplace("g", MetricMap(x, y, {0, 1}, Modulus::lipschitz(2)));
    sig.predicates.emplace("P", truth_predicate(y));
    sig.predicates.emplace("Q", Predicate(x, {t(0), t(1, 8)}, Modulus::identity()));
    return sig;
}

ParseError parse_error(const std::string& text) {
    try {
        parse(text);
    } catch (const ParseError& e) {
        return e;
    }
    FAIL("expected a syntax error for: " << text);
    return ParseError("");
}

ParseError type_error(const std::string& text, const Signature& sig, const Env& env) {
    try {
        typecheck(parse(text), sig, env);
    } catch (const ParseError& e) {
        return e;
    }
    FAIL("expected a typing error for: " << text);
    return ParseError("");
}

Modulus two() { return combine(Combine::Add, Modulus::identity(), Modulus::identity()); }

} // namespace

TEST_CASE("parsing") {
    Formula f = parse("inf y:Y. d(c, y)");
    CHECK(f.kind == Kind::Inf);
    CHECK(f.name == "y");
    CHECK(f.space == "Y");
    REQUIRE(f.children.size() == 1);
    CHECK(f.children[0].kind == Kind::Distance);
    CHECK(f.children[0].terms[0].name == "c");
    CHECK(f.children[0].terms[1].name == "y");

    Formula g = parse("max(P(x), Q(x)) + const(1/4)");
    CHECK(g.kind == Kind::Plus);
    CHECK(g.children[0].kind == Kind::Max);
    CHECK(g.children[0].children[0].kind == Kind::Atom);
    CHECK(g.children[0].children[1].name == "Q");
    CHECK(g.children[1].kind == Kind::Const);
    CHECK(g.children[1].constant == q(1, 4));

    CHECK(parse("const(0.25)").constant == q(1, 4));
    CHECK(parse("const(1)").constant == q(1));

    // + nests to the left; quantifier bodies run to the end.
    Formula s = parse("P(x) + P(y) + P(z)");
    CHECK(s.children[0].kind == Kind::Plus);
    CHECK(s.children[1].terms[0].name == "z");
    Formula b = parse("sup y:Y. P(y) + const(1/2)");
    CHECK(b.kind == Kind::Sup);
    CHECK(b.children[0].kind == Kind::Plus);
    Formula p = parse("(sup y:Y. P(y)) + const(1/2)");
    CHECK(p.kind == Kind::Plus);

    Formula nested = parse("R(g(h(x)), y)");
    CHECK(nested.terms[0].args[0].args[0].name == "x");
    CHECK(nested.terms[0].pos.column == 3);
}

TEST_CASE("syntax errors carry positions") {
    ParseError e = parse_error("d(x, y");
    CHECK(std::string(e.what()).find("end of input") != std::string::npos);
    CHECK(e.line() == 1);
    CHECK(e.column() == 7);

    ParseError two_lines = parse_error("inf y:Y.\n  d(c, y))");
    CHECK(two_lines.line() == 2);
    CHECK(two_lines.column() == 10);

    CHECK(parse_error("const(x)").column() == 7);
    CHECK(parse_error("inf y Y. P(y)").column() == 7);
    CHECK(parse_error("P(x) +").column() == 7);
    CHECK(parse_error("d(x; y)").column() == 4);
    CHECK(parse_error("").line() == 1);
}

TEST_CASE("typing errors") {
    Signature sig = example_signature();
    Env env{{"x", sig.spaces.at("X")}};

    ParseError unbound = type_error("d(x, z)", sig, env);
    CHECK(std::string(unbound.what()).find("unbound identifier 'z'") != std::string::npos);
    CHECK(unbound.column() == 6);

    ParseError across = type_error("d(c, x)", sig, env);
    CHECK(std::string(across.what()).find("sort mismatch: d applied across") != std::string::npos);

    CHECK(std::string(type_error("P(x)", sig, env).what()).find("sort mismatch") != std::string::npos);
    CHECK(std::string(type_error("P(g(c))", sig, env).what()).find("map 'g'") != std::string::npos);
    CHECK(std::string(type_error("inf y:Z. P(y)", sig, env).what()).find("'Z'") != std::string::npos);
    CHECK(std::string(type_error("S(x)", sig, env).what()).find("unbound identifier 'S'") != std::string::npos);

    // A binder shadows an outer variable of another sort.
    CHECK_NOTHROW(typecheck(parse("inf x:Y. P(x)"), sig, env));
    CHECK_NOTHROW(typecheck(parse("P(g(x))"), sig, env));
}

TEST_CASE("modulus inference") {
    Signature sig = example_signature();
    const SpacePtr& x = sig.spaces.at("X");
    const SpacePtr& y = sig.spaces.at("Y");

    CHECK(infer_modulus(parse("d(x, y)"), sig, {{"x", x}, {"y", x}}) == two());
    CHECK(infer_modulus(parse("P(g(x))"), sig, {{"x", x}}) == Modulus::lipschitz(2));
    CHECK(infer_modulus(parse("const(1/3)"), sig, {}) == Modulus::zero());
    CHECK(infer_modulus(parse("max(Q(x), P(g(x)))"), sig, {{"x", x}}) == Modulus::lipschitz(2));
    CHECK(infer_modulus(parse("Q(x) + P(g(x))"), sig, {{"x", x}}) == Modulus::lipschitz(3));

    // Sound but not tight.
    Env env{{"x", y}};
    Formula f = parse("inf y:Y. d(x, y)");
    Modulus inferred = infer_modulus(f, sig, env);
    CHECK(inferred == two());
    Predicate val = evaluate(f, sig, env);
    CHECK(check_modulus(*val.space(), val.values(), inferred));
    Modulus tight = tightest_modulus(*val.space(), val.values());
    CHECK(leq(tight, Modulus::identity()));
    CHECK(leq(tight, inferred));
    CHECK_FALSE(tight == inferred);

    Predicate pg = evaluate(parse("P(g(x))"), sig, {{"x", x}});
    CHECK(pg.values()[0] == t(0));
    CHECK(pg.values()[1] == t(1, 2));
    CHECK(tightest_modulus(*x, pg.values()) == Modulus::step({{q(1, 4), t(1, 2)}}));
}

TEST_CASE("evaluation") {
    Signature sig = example_signature();
    CHECK(evaluate_closed(parse("const(1/3)"), sig) == t(1, 3));
    CHECK(evaluate_closed(parse("inf y:Y. d(c, y)"), sig) == t(0));
    CHECK(evaluate_closed(parse("sup y:Y. d(c, y)"), sig) == t(1));
    CHECK(evaluate_closed(parse("const(3/4) + const(1/2)"), sig) == t(1));
    CHECK(evaluate_closed(parse("min(const(3/4), P(c))"), sig) == t(0));
    CHECK(evaluate_closed(parse("max(const(3/4), sup y:Y. P(y))"), sig) == t(1));
    CHECK(evaluate_closed(parse("sup y:Y. inf u:Y. d(u, y)"), sig) == t(0));
    CHECK(evaluate_closed(parse("inf y:Y. sup u:Y. d(u, y)"), sig) == t(1, 2));
    CHECK(evaluate_closed(parse("inf z:X. Q(z)"), sig) == t(0));

    // Two free variables: the context is Y x X in env order.
    const SpacePtr& x = sig.spaces.at("X");
    const SpacePtr& y = sig.spaces.at("Y");
    Predicate two_vars = evaluate(parse("d(u, g(v))"), sig, {{"u", y}, {"v", x}});
    REQUIRE(two_vars.space()->size() == 6);
    CHECK(two_vars.value(0) == t(0));    // (0, a)
    CHECK(two_vars.value(1) == t(1, 2)); // (0, b)
    CHECK(two_vars.value(2) == t(1, 2)); // (1/2, a)
    CHECK(two_vars.value(4) == t(1));    // (1, a)
    CHECK(same_space(context_space({{"u", y}, {"v", x}}), two_vars.space()));
    CHECK(context_space({})->size() == 1);

    CHECK_THROWS_WITH_AS(evaluate_closed(parse("const(3/2)"), sig), doctest::Contains("outside the carrier"),
                         ParseError);
}

TEST_CASE("quantifiers over empty spaces") {
    Signature sig = example_signature();
    sig.spaces.emplace("E", make_space("E", {}, {}));
    CHECK_THROWS_WITH_AS(evaluate_closed(parse("sup e:E. const(0)"), sig),
                         doctest::Contains("forall requires inhabited factor"), ParseError);
    CHECK(evaluate_closed(parse("inf e:E. const(0)"), sig) == t(1));
}

TEST_CASE("moduloid clamping") {
    Signature sig = example_signature();
    const SpacePtr& x = sig.spaces.at("X");
    sig.moduloid = Moduloid::E1;
    CHECK(evaluate(parse("const(1/3)"), sig, {{"x", x}}).modulus() == Modulus::identity());
    CHECK(evaluate(parse("Q(x)"), sig, {{"x", x}}).modulus() == Modulus::identity());
    CHECK_THROWS_AS(evaluate(parse("d(x, y)"), sig, {{"x", x}, {"y", x}}), PreconditionError);

    sig.moduloid = Moduloid::EL;
    CHECK(evaluate(parse("const(1/3)"), sig, {{"x", x}}).modulus() == Modulus::identity());
    CHECK(evaluate(parse("d(x, y)"), sig, {{"x", x}, {"y", x}}).modulus() == Modulus::lipschitz(2));

    // Raising the modulus leaves the values alone.
    sig.moduloid = Moduloid::EuPL;
    Predicate raw = evaluate(parse("const(1/3) + Q(x)"), sig, {{"x", x}});
    sig.moduloid = Moduloid::EL;
    Predicate clamped = evaluate(parse("const(1/3) + Q(x)"), sig, {{"x", x}});
    CHECK(std::equal(raw.values().begin(), raw.values().end(), clamped.values().begin()));
    CHECK(leq(raw.modulus(), clamped.modulus()));
}

TEST_CASE("printing round trip") {
    for (const char* text : {"inf y:Y. d(c, y)", "max(P(x), Q(x)) + const(1/4)", "sup y:Y. P(y) + const(1/2)",
                             "(sup y:Y. P(y)) + const(1/2)", "P(x) + (P(y) + P(z))", "R(g(h(x)), y)",
                             "min(inf u:X. Q(u), const(0))"}) {
        Formula f = parse(text);
        CHECK(parse(to_string(f)) == f);
    }
    CHECK(to_string(parse("P(x)+P(y)+P(z)")) == "((P(x) + P(y)) + P(z))");
}

TEST_CASE("substitution") {
    Signature sig = example_signature();
    const SpacePtr& x = sig.spaces.at("X");
    const SpacePtr& y = sig.spaces.at("Y");

    Formula f = parse("d(u, g(v)) + (inf v:X. Q(v))");
    Term by = parse("P(g(a))").terms[0];
    Formula s = substitute(f, "v", by);
    CHECK(s == parse("d(u, g(g(a))) + (inf v:X. Q(v))"));

    CHECK_THROWS_AS(substitute(parse("inf y:Y. d(x, y)"), "x", parse("P(y)").terms[0]), PreconditionError);

    // Evaluating f[a/v] is pulling f back along (u, v) -> (u, a).
    Env env{{"u", y}, {"v", x}};
    Predicate whole = evaluate(f, sig, env);
    Predicate sub = evaluate(substitute(f, "v", parse("P(a)").terms[0]), sig, env);
    SpacePtr ctx = whole.space();
    std::vector<std::size_t> assign(ctx->size());
    for (std::size_t e = 0; e < ctx->size(); ++e) assign[e] = (e / 2) * 2;
    Predicate pulled = predicate_pullback(MetricMap(ctx, ctx, assign), whole);
    CHECK(std::equal(sub.values().begin(), sub.values().end(), pulled.values().begin()));
}

TEST_CASE("property: random formulas") {
    for (std::uint64_t seed : {3u, 11u, 29u}) {
        laws::Params p;
        p.seed = seed;
        p.count = 150;
        laws::Report rep = laws::dsl_suite(p);
        for (const auto& w : rep.witnesses()) INFO(w.law << ": " << w.detail);
        CHECK(rep.passed());
        CHECK(rep.laws().at("substitution is pullback").checks > 0);
        CHECK(rep.laws().at("inf agrees with exists").checks > 0);
        CHECK(rep.laws().at("sup agrees with forall").checks > 0);
    }

    gen::Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        Signature sig = laws::random_signature(rng, 3);
        Env env = laws::random_env(rng, sig);
        Formula f = laws::random_formula(rng, sig, env, 3);
        Predicate val = evaluate(f, sig, env);
        CHECK(is_epsilon_predicate(to_family(val), val.modulus()));
        CHECK(leq(tightest_modulus(*val.space(), val.values()), val.modulus()));
    }
}
