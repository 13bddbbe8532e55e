#pragma once

#include "contsem/predicate.hpp"
#include "contsem/quantifier.hpp"

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace contsem::dsl {

struct Position {
    std::size_t line = 1;
    std::size_t column = 1;
};

/// ident, or ident(term): a variable, a point constant, or a map applied to
/// a term.
struct Term {
    std::string name;
    std::vector<Term> args; // empty, or exactly one argument
    Position pos;

    bool is_application() const noexcept { return !args.empty(); }
    friend bool operator==(const Term& a, const Term& b) {
        return a.name == b.name && a.args == b.args;
    }
};

enum class Kind { Distance, Atom, Plus, Max, Min, Const, Inf, Sup };

struct Formula {
    Kind kind;
    std::string name;            // predicate symbol, or bound variable
    std::string space;           // quantified space
    Rational constant;           // const(r)
    std::vector<Term> terms;     // d(t1, t2) and P(t, ...)
    std::vector<Formula> children;
    Position pos;

    friend bool operator==(const Formula& a, const Formula& b) {
        return a.kind == b.kind && a.name == b.name && a.space == b.space &&
               a.constant == b.constant && a.terms == b.terms && a.children == b.children;
    }
};

/// Throws ParseError with line and column.
Formula parse(std::string_view text);

/// Parenthesized rendering that parses back to an equal formula.
std::string to_string(const Formula& f);
std::string to_string(const Term& t);

/// Named structures formulas may refer to.
struct Signature {
    std::map<std::string, SpacePtr> spaces;
    std::map<std::string, std::pair<SpacePtr, std::size_t>> constants;
    std::map<std::string, MetricMap> maps;
    std::map<std::string, Predicate> predicates;
    /// The reported modulus is raised to the least member of this moduloid.
    Moduloid moduloid = Moduloid::EuPL;
};

/// Variables in scope, innermost first. Evaluation happens over the
/// right-nested max-metric product of their spaces (the one-point space when
/// empty).
using Env = std::vector<std::pair<std::string, SpacePtr>>;

/// The space a formula under env evaluates over.
SpacePtr context_space(const Env& env, Quantale q = Quantale{});

/// Resolves every identifier and checks sorts; throws ParseError at the
/// offending position.
void typecheck(const Formula& f, const Signature& sig, const Env& env);

/// Structural modulus: variables id, map application composes, d adds the
/// term moduli, P(t) composes with the predicate modulus, + adds, max/min
/// take the max, const is zero, quantifiers keep the body modulus. Not
/// clamped to the signature's moduloid.
Modulus infer_modulus(const Formula& f, const Signature& sig, const Env& env);

/// The predicate over context_space(env); its modulus is infer_modulus
/// raised into the signature's moduloid. Throws on an empty space under sup.
Predicate evaluate(const Formula& f, const Signature& sig, const Env& env);

/// Value of a formula with no free variables.
TruthValue evaluate_closed(const Formula& f, const Signature& sig);

/// Replaces free occurrences of var by t. Throws when a binder would capture
/// a variable of t.
Formula substitute(const Formula& f, const std::string& var, const Term& t);

} // namespace contsem::dsl
