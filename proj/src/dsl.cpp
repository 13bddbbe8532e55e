#include "contsem/dsl.hpp"

#include "contsem/error.hpp"

#include <cctype>
#include <functional>

namespace contsem::dsl {

namespace {

// ---- lexer -------------------------------------------------------------------

enum class Tok { Ident, Number, LParen, RParen, Comma, Colon, Dot, Plus, End };

struct Token {
    Tok kind;
    std::string text;
    Position pos;
};

std::string describe(const Token& t) {
    switch (t.kind) {
    case Tok::Ident:
        return "identifier '" + t.text + "'";
    case Tok::Number:
        return "number '" + t.text + "'";
    case Tok::End:
        return "end of input";
    default:
        return "'" + t.text + "'";
    }
}

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    Position pos;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++pos.line;
                pos.column = 1;
            } else {
                ++pos.column;
            }
            ++i;
        }
    };
    auto digit = [&](std::size_t k) {
        return k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]));
    };
    while (i < src.size()) {
        unsigned char c = static_cast<unsigned char>(src[i]);
        if (std::isspace(c)) {
            advance(1);
            continue;
        }
        Position start = pos;
        if (std::isalpha(c) || c == '_') {
            std::size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
                ++j;
            }
            out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), start});
            advance(j - i);
            continue;
        }
        if (std::isdigit(c)) {
            std::size_t j = i;
            while (digit(j)) ++j;
            // A '/' or '.' continues the number only when digits follow.
            if (j < src.size() && (src[j] == '/' || src[j] == '.') && digit(j + 1)) {
                ++j;
                while (digit(j)) ++j;
            }
            out.push_back({Tok::Number, std::string(src.substr(i, j - i)), start});
            advance(j - i);
            continue;
        }
        Tok kind;
        switch (c) {
        case '(':
            kind = Tok::LParen;
            break;
        case ')':
            kind = Tok::RParen;
            break;
        case ',':
            kind = Tok::Comma;
            break;
        case ':':
            kind = Tok::Colon;
            break;
        case '.':
            kind = Tok::Dot;
            break;
        case '+':
            kind = Tok::Plus;
            break;
        default:
            throw ParseError("syntax error: unexpected character '" + std::string(1, src[i]) + "'",
                             start.line, start.column);
        }
        out.push_back({kind, std::string(1, src[i]), start});
        advance(1);
    }
    out.push_back({Tok::End, "", pos});
    return out;
}

// ---- parser ------------------------------------------------------------------

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Formula parse_all() {
        Formula f = formula();
        if (peek().kind != Tok::End) fail("expected end of input");
        return f;
    }

private:
    const Token& peek() const { return toks_[at_]; }
    const Token& next() { return toks_[at_++]; }
    bool peek_ident(std::string_view word) const {
        return peek().kind == Tok::Ident && peek().text == word;
    }

    [[noreturn]] void fail(const std::string& expected) const {
        throw ParseError("syntax error: " + expected + " but found " + describe(peek()),
                         peek().pos.line, peek().pos.column);
    }

    const Token& expect(Tok kind, const char* what) {
        if (peek().kind != kind) fail(std::string("expected ") + what);
        return next();
    }

    Formula formula() {
        if (peek_ident("inf") || peek_ident("sup")) {
            Formula q;
            q.pos = peek().pos;
            q.kind = next().text == "inf" ? Kind::Inf : Kind::Sup;
            q.name = expect(Tok::Ident, "a variable name").text;
            expect(Tok::Colon, "':'");
            q.space = expect(Tok::Ident, "a space name").text;
            expect(Tok::Dot, "'.'");
            q.children.push_back(formula());
            return q;
        }
        Formula left = atom();
        while (peek().kind == Tok::Plus) {
            Formula sum;
            sum.kind = Kind::Plus;
            sum.pos = next().pos;
            sum.children.push_back(std::move(left));
            sum.children.push_back(atom());
            left = std::move(sum);
        }
        return left;
    }

    Formula atom() {
        Formula f;
        f.pos = peek().pos;
        if (peek().kind == Tok::LParen) {
            next();
            Formula inner = formula();
            expect(Tok::RParen, "')'");
            return inner;
        }
        if (peek().kind != Tok::Ident) fail("expected a formula");
        const std::string head = next().text;
        expect(Tok::LParen, "'('");
        if (head == "d") {
            f.kind = Kind::Distance;
            f.terms.push_back(term());
            expect(Tok::Comma, "','");
            f.terms.push_back(term());
        } else if (head == "max" || head == "min") {
            f.kind = head == "max" ? Kind::Max : Kind::Min;
            f.children.push_back(formula());
            expect(Tok::Comma, "','");
            f.children.push_back(formula());
        } else if (head == "const") {
            f.kind = Kind::Const;
            const Token& n = expect(Tok::Number, "a rational");
            f.constant = parse_rational(n.text);
        } else if (head == "inf" || head == "sup") {
            fail("expected a formula");
        } else {
            f.kind = Kind::Atom;
            f.name = head;
            f.terms.push_back(term());
            while (peek().kind == Tok::Comma) {
                next();
                f.terms.push_back(term());
            }
        }
        expect(Tok::RParen, "')'");
        return f;
    }

    Term term() {
        Term t;
        t.pos = peek().pos;
        t.name = expect(Tok::Ident, "a term").text;
        if (peek().kind == Tok::LParen) {
            next();
            t.args.push_back(term());
            expect(Tok::RParen, "')'");
        }
        return t;
    }

    std::vector<Token> toks_;
    std::size_t at_ = 0;
};

// ---- typing ------------------------------------------------------------------

[[noreturn]] void type_error(const std::string& what, Position pos) {
    throw ParseError(what, pos.line, pos.column);
}

const SpacePtr* lookup_var(const Env& env, const std::string& name) {
    for (const auto& [v, s] : env) {
        if (v == name) return &s;
    }
    return nullptr;
}

SpacePtr sort_of(const Term& t, const Signature& sig, const Env& env) {
    if (!t.is_application()) {
        if (const SpacePtr* s = lookup_var(env, t.name)) return *s;
        if (auto it = sig.constants.find(t.name); it != sig.constants.end()) return it->second.first;
        type_error("unbound identifier '" + t.name + "'", t.pos);
    }
    auto it = sig.maps.find(t.name);
    if (it == sig.maps.end()) type_error("unbound identifier '" + t.name + "'", t.pos);
    SpacePtr arg = sort_of(t.args.front(), sig, env);
    if (!same_space(arg, it->second.source())) {
        type_error("sort mismatch: map '" + t.name + "' expects '" + it->second.source()->id() +
                       "' but its argument has sort '" + arg->id() + "'",
                   t.args.front().pos);
    }
    return it->second.target();
}

/// Whether space is the right-nested product of sorts[k..].
bool product_of(const SpacePtr& space, const std::vector<SpacePtr>& sorts, std::size_t k) {
    if (k + 1 == sorts.size()) return same_space(space, sorts[k]);
    if (space->factors().size() != 2) return false;
    return same_space(space->factors()[0], sorts[k]) && product_of(space->factors()[1], sorts, k + 1);
}

const SpacePtr& quantified_space(const Formula& f, const Signature& sig) {
    auto it = sig.spaces.find(f.space);
    if (it == sig.spaces.end()) type_error("unbound identifier '" + f.space + "'", f.pos);
    return it->second;
}

Env bind(const Env& env, const std::string& var, const SpacePtr& space) {
    Env out;
    out.reserve(env.size() + 1);
    out.emplace_back(var, space);
    out.insert(out.end(), env.begin(), env.end());
    return out;
}

void check(const Formula& f, const Signature& sig, const Env& env) {
    switch (f.kind) {
    case Kind::Distance: {
        SpacePtr a = sort_of(f.terms[0], sig, env);
        SpacePtr b = sort_of(f.terms[1], sig, env);
        if (!same_space(a, b)) {
            type_error("sort mismatch: d applied across '" + a->id() + "' and '" + b->id() + "'",
                       f.pos);
        }
        return;
    }
    case Kind::Atom: {
        auto it = sig.predicates.find(f.name);
        if (it == sig.predicates.end()) type_error("unbound identifier '" + f.name + "'", f.pos);
        std::vector<SpacePtr> sorts;
        for (const Term& t : f.terms) sorts.push_back(sort_of(t, sig, env));
        if (!product_of(it->second.space(), sorts, 0)) {
            std::string got;
            for (const SpacePtr& s : sorts) got += (got.empty() ? "" : "*") + s->id();
            type_error("sort mismatch: predicate '" + f.name + "' lives on '" +
                           it->second.space()->id() + "' but is applied to '" + got + "'",
                       f.pos);
        }
        return;
    }
    case Kind::Const:
        return;
    case Kind::Inf:
    case Kind::Sup:
        check(f.children[0], sig, bind(env, f.name, quantified_space(f, sig)));
        return;
    default:
        for (const Formula& c : f.children) check(c, sig, env);
    }
}

// ---- evaluation --------------------------------------------------------------

/// The space evaluated over, and a coordinate map per variable in scope.
struct Context {
    SpacePtr space;
    std::vector<std::pair<std::string, MetricMap>> coords;
};

Context make_context(const Env& env, const Quantale& q) {
    if (env.empty()) return Context{terminal_space(q), {}};
    if (env.size() == 1) return Context{env[0].second, {{env[0].first, identity_map(env[0].second)}}};
    Context rest = make_context(Env(env.begin() + 1, env.end()), q);
    SpacePtr space = product(env[0].second, rest.space);
    Context out{space, {}};
    out.coords.emplace_back(env[0].first, projection_map(space, 0));
    MetricMap tail = projection_map(space, 1);
    for (const auto& [v, m] : rest.coords) out.coords.emplace_back(v, compose_maps(m, tail));
    return out;
}

Context extend(const Context& ctx, const std::string& var, const SpacePtr& y) {
    SpacePtr space = product(y, ctx.space);
    Context out{space, {}};
    out.coords.emplace_back(var, projection_map(space, 0));
    MetricMap tail = projection_map(space, 1);
    for (const auto& [v, m] : ctx.coords) out.coords.emplace_back(v, compose_maps(m, tail));
    return out;
}

MetricMap term_map(const Term& t, const Signature& sig, const Context& ctx) {
    if (!t.is_application()) {
        for (const auto& [v, m] : ctx.coords) {
            if (v == t.name) return m;
        }
        const auto& [space, point] = sig.constants.at(t.name);
        return MetricMap(ctx.space, space, std::vector<std::size_t>(ctx.space->size(), point),
                         Modulus::zero(ctx.space->quantale()));
    }
    return compose_maps(sig.maps.at(t.name), term_map(t.args.front(), sig, ctx));
}

MetricMap tuple_map(const std::vector<Term>& terms, std::size_t k, const Signature& sig,
                    const Context& ctx) {
    MetricMap head = term_map(terms[k], sig, ctx);
    if (k + 1 == terms.size()) return head;
    return pair_maps(head, tuple_map(terms, k + 1, sig, ctx));
}

Predicate eval(const Formula& f, const Signature& sig, const Context& ctx) {
    const Quantale& q = ctx.space->quantale();
    switch (f.kind) {
    case Kind::Distance:
        return pair_distance_predicate(term_map(f.terms[0], sig, ctx), term_map(f.terms[1], sig, ctx));
    case Kind::Atom:
        return predicate_pullback(tuple_map(f.terms, 0, sig, ctx), sig.predicates.at(f.name));
    case Kind::Plus: {
        Predicate a = eval(f.children[0], sig, ctx);
        Predicate b = eval(f.children[1], sig, ctx);
        std::vector<TruthValue> v(ctx.space->size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = q.tensor(a.value(i), b.value(i));
        return Predicate(ctx.space, std::move(v), combine(Combine::Add, a.modulus(), b.modulus()));
    }
    case Kind::Max:
    case Kind::Min: {
        const Predicate items[] = {eval(f.children[0], sig, ctx), eval(f.children[1], sig, ctx)};
        return predicate_lattice(f.kind == Kind::Max ? LatticeOp::Meet : LatticeOp::Join, ctx.space,
                                 items);
    }
    case Kind::Const: {
        TruthValue c(f.constant);
        if (!q.contains(c)) {
            type_error("constant " + to_string(c) + " lies outside the carrier", f.pos);
        }
        return Predicate(ctx.space, std::vector<TruthValue>(ctx.space->size(), c), Modulus::zero(q));
    }
    case Kind::Inf:
    case Kind::Sup: {
        const SpacePtr& y = sig.spaces.at(f.space);
        if (f.kind == Kind::Sup && y->empty()) {
            type_error("sup over empty space '" + f.space + "': forall requires inhabited factor", f.pos);
        }
        Context inner = extend(ctx, f.name, y);
        Predicate body = eval(f.children[0], sig, inner);
        return quantify_direct(f.kind == Kind::Inf ? Quantifier::Inf : Quantifier::Sup,
                               projection_map(inner.space, 1), body);
    }
    }
    throw Error("unreachable formula kind");
}

Modulus term_modulus(const Term& t, const Signature& sig, const Env& env, const Quantale& q) {
    if (!t.is_application()) {
        return lookup_var(env, t.name) ? Modulus::identity(q) : Modulus::zero(q);
    }
    return compose(sig.maps.at(t.name).modulus(), term_modulus(t.args.front(), sig, env, q));
}

Modulus infer(const Formula& f, const Signature& sig, const Env& env, const Quantale& q) {
    switch (f.kind) {
    case Kind::Distance:
        return combine(Combine::Add, term_modulus(f.terms[0], sig, env, q),
                       term_modulus(f.terms[1], sig, env, q));
    case Kind::Atom: {
        Modulus args = term_modulus(f.terms[0], sig, env, q);
        for (std::size_t k = 1; k < f.terms.size(); ++k) {
            args = combine(Combine::Max, args, term_modulus(f.terms[k], sig, env, q));
        }
        return compose(sig.predicates.at(f.name).modulus(), args);
    }
    case Kind::Plus:
        return combine(Combine::Add, infer(f.children[0], sig, env, q), infer(f.children[1], sig, env, q));
    case Kind::Max:
    case Kind::Min:
        return combine(Combine::Max, infer(f.children[0], sig, env, q), infer(f.children[1], sig, env, q));
    case Kind::Const:
        return Modulus::zero(q);
    case Kind::Inf:
    case Kind::Sup:
        return infer(f.children[0], sig, bind(env, f.name, sig.spaces.at(f.space)), q);
    }
    throw Error("unreachable formula kind");
}

Quantale quantale_of(const Signature& sig, const Env& env) {
    if (!env.empty()) return env.front().second->quantale();
    if (!sig.spaces.empty()) return sig.spaces.begin()->second->quantale();
    return Quantale{};
}

bool free_in(const Term& t, const std::string& var) {
    if (!t.is_application()) return t.name == var;
    return free_in(t.args.front(), var);
}

Term substitute_term(const Term& t, const std::string& var, const Term& by) {
    if (!t.is_application()) return t.name == var ? by : t;
    Term out = t;
    out.args.front() = substitute_term(t.args.front(), var, by);
    return out;
}

} // namespace

Formula parse(std::string_view text) { return Parser(lex(text)).parse_all(); }

std::string to_string(const Term& t) {
    if (!t.is_application()) return t.name;
    return t.name + "(" + to_string(t.args.front()) + ")";
}

std::string to_string(const Formula& f) {
    auto operand = [](const Formula& c) {
        std::string s = to_string(c);
        return c.kind == Kind::Inf || c.kind == Kind::Sup ? "(" + s + ")" : s;
    };
    switch (f.kind) {
    case Kind::Distance:
        return "d(" + to_string(f.terms[0]) + ", " + to_string(f.terms[1]) + ")";
    case Kind::Atom: {
        std::string s = f.name + "(";
        for (std::size_t k = 0; k < f.terms.size(); ++k) s += (k ? ", " : "") + to_string(f.terms[k]);
        return s + ")";
    }
    case Kind::Plus:
        return "(" + operand(f.children[0]) + " + " + operand(f.children[1]) + ")";
    case Kind::Max:
    case Kind::Min:
        return std::string(f.kind == Kind::Max ? "max(" : "min(") + to_string(f.children[0]) + ", " +
               to_string(f.children[1]) + ")";
    case Kind::Const:
        return "const(" + contsem::to_string(f.constant) + ")";
    case Kind::Inf:
    case Kind::Sup:
        return std::string(f.kind == Kind::Inf ? "inf " : "sup ") + f.name + ":" + f.space + ". " +
               to_string(f.children[0]);
    }
    return {};
}

SpacePtr context_space(const Env& env, Quantale q) { return make_context(env, q).space; }

void typecheck(const Formula& f, const Signature& sig, const Env& env) { check(f, sig, env); }

Modulus infer_modulus(const Formula& f, const Signature& sig, const Env& env) {
    check(f, sig, env);
    return infer(f, sig, env, quantale_of(sig, env));
}

Predicate evaluate(const Formula& f, const Signature& sig, const Env& env) {
    check(f, sig, env);
    Predicate p = eval(f, sig, make_context(env, quantale_of(sig, env)));
    if (sig.moduloid == Moduloid::EuPL || contains(sig.moduloid, p.modulus())) return p;
    return Predicate(p.space(), std::vector<TruthValue>(p.values().begin(), p.values().end()),
                     least_member_above(sig.moduloid, p.modulus()));
}

TruthValue evaluate_closed(const Formula& f, const Signature& sig) {
    return evaluate(f, sig, {}).value(0);
}

Formula substitute(const Formula& f, const std::string& var, const Term& t) {
    Formula out = f;
    if (f.kind == Kind::Inf || f.kind == Kind::Sup) {
        if (f.name == var) return out;
        if (free_in(t, f.name)) {
            throw PreconditionError("substituting for '" + var + "' would capture '" + f.name + "'");
        }
    }
    for (Term& term : out.terms) term = substitute_term(term, var, t);
    for (Formula& c : out.children) c = substitute(c, var, t);
    return out;
}

} // namespace contsem::dsl
