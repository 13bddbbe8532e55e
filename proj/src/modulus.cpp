#include "contsem/modulus.hpp"

#include "contsem/error.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

namespace contsem {

namespace {

/// A piece restricted to an interval [start, next): its value at start and
/// its slope. Infinite values carry slope 0.
struct Segment {
    TruthValue value;
    Rational slope;
};

std::size_t piece_index(std::span<const Piece> pieces, const Rational& r) {
    auto it = std::upper_bound(pieces.begin(), pieces.end(), r,
                               [](const Rational& x, const Piece& p) { return x < p.breakpoint; });
    return static_cast<std::size_t>(std::distance(pieces.begin(), it)) - 1;
}

TruthValue extend(const Piece& p, const Rational& r) {
    if (p.intercept.is_infinite()) return TruthValue::infinity();
    return TruthValue(p.intercept.value() + p.slope * (r - p.breakpoint));
}

Segment segment_at(std::span<const Piece> pieces, const Rational& r) {
    const Piece& p = pieces[piece_index(pieces, r)];
    if (p.intercept.is_infinite()) return {TruthValue::infinity(), Rational(0)};
    return {extend(p, r), p.slope};
}

/// Right end of the last interval: 1 in the bounded carrier, none otherwise.
std::optional<Rational> carrier_end(const Quantale& q) {
    if (q.bounded()) return Rational(1);
    return std::nullopt;
}

std::optional<Rational> interval_end(const std::vector<Rational>& starts, std::size_t k,
                                     const Quantale& q) {
    if (k + 1 < starts.size()) return starts[k + 1];
    return carrier_end(q);
}

std::vector<Rational> merged_breakpoints(std::span<const Piece> a, std::span<const Piece> b) {
    std::vector<Rational> out;
    out.reserve(a.size() + b.size());
    for (const Piece& p : a) out.push_back(p.breakpoint);
    for (const Piece& p : b) out.push_back(p.breakpoint);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool mergeable(const Piece& a, const Piece& b, const Quantale& q) {
    if (a.intercept.is_infinite() || b.intercept.is_infinite()) {
        return a.intercept.is_infinite() && b.intercept.is_infinite();
    }
    if (extend(a, b.breakpoint) != b.intercept) return false;
    return a.slope == b.slope || (q.bounded() && b.breakpoint == 1);
}

/// Truncates at the carrier top and merges collinear neighbours. Input
/// pieces must already start at 0, be sorted, and be monotone.
std::vector<Piece> canonicalize(std::vector<Piece> pieces, const Quantale& q) {
    std::vector<Piece> truncated;
    truncated.reserve(pieces.size() + 1);
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        Piece p = pieces[i];
        if (p.intercept.is_infinite()) p.slope = 0;
        if (q.bounded()) {
            if (p.breakpoint == 1) p.slope = 0;
            if (p.intercept.is_infinite() || p.intercept.value() >= 1) {
                p.intercept = TruthValue(1);
                p.slope = 0;
            } else if (p.slope > 0) {
                Rational end = i + 1 < pieces.size() ? pieces[i + 1].breakpoint : Rational(1);
                Rational cross = p.breakpoint + (1 - p.intercept.value()) / p.slope;
                if (cross < end) {
                    truncated.push_back(p);
                    truncated.push_back(Piece{cross, TruthValue(1), Rational(0)});
                    continue;
                }
            }
        }
        truncated.push_back(std::move(p));
    }

    std::vector<Piece> out;
    out.reserve(truncated.size());
    for (Piece& p : truncated) {
        if (!out.empty() && mergeable(out.back(), p, q)) continue;
        out.push_back(std::move(p));
    }
    return out;
}

void require_same_quantale(const Modulus& a, const Modulus& b) {
    if (a.quantale() != b.quantale()) {
        throw PreconditionError("moduli over different quantales cannot be combined");
    }
}

} // namespace

Modulus Modulus::identity(Quantale q) {
    return Modulus(q, {Piece{Rational(0), TruthValue(0), Rational(1)}});
}

Modulus Modulus::zero(Quantale q) {
    return Modulus(q, {Piece{Rational(0), TruthValue(0), Rational(0)}});
}

Modulus Modulus::lipschitz(const Rational& k, Quantale q) {
    if (k < 0) throw PreconditionError("Lipschitz constant must be nonnegative");
    return from_pieces({Piece{Rational(0), TruthValue(0), k}}, q);
}

Modulus Modulus::step(std::vector<std::pair<Rational, TruthValue>> jumps, Quantale q) {
    std::vector<Piece> pieces{Piece{Rational(0), TruthValue(0), Rational(0)}};
    for (auto& [at, value] : jumps) {
        if (at <= 0) throw PreconditionError("step positions must be positive");
        pieces.push_back(Piece{std::move(at), std::move(value), Rational(0)});
    }
    return from_pieces(std::move(pieces), q);
}

Modulus Modulus::from_pieces(std::vector<Piece> pieces, Quantale q) {
    if (pieces.empty()) throw PreconditionError("modulus needs at least one piece");
    if (pieces.front().breakpoint != 0) {
        throw PreconditionError("first modulus breakpoint must be 0");
    }
    if (pieces.front().intercept != TruthValue(0)) {
        throw PreconditionError("modulus must map 0 to 0");
    }
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const Piece& p = pieces[i];
        if (p.slope < 0) throw PreconditionError("modulus slopes must be nonnegative");
        if (p.intercept.is_finite() && p.intercept.value() < 0) {
            throw PreconditionError("modulus values must be nonnegative");
        }
        if (q.bounded() && p.intercept.is_infinite()) {
            throw PreconditionError("infinite modulus value outside extended-nonneg mode");
        }
        if (q.bounded() && p.breakpoint > 1) {
            throw PreconditionError("modulus breakpoint " + to_string(p.breakpoint) +
                                    " lies outside [0,1]");
        }
        if (i > 0) {
            const Piece& prev = pieces[i - 1];
            if (!(prev.breakpoint < p.breakpoint)) {
                throw PreconditionError("modulus breakpoints must be strictly increasing");
            }
            if (extend(prev, p.breakpoint) > p.intercept) {
                throw PreconditionError("modulus decreases at breakpoint " +
                                        to_string(p.breakpoint));
            }
        }
    }
    return Modulus(q, canonicalize(std::move(pieces), q));
}

TruthValue Modulus::operator()(const TruthValue& r) const {
    if (r.is_infinite() || (quantale_.bounded() && r.value() >= 1)) {
        if (quantale_.bounded()) return quantale_.truncate(extend(pieces_.back(), Rational(1)));
        const Piece& last = pieces_.back();
        if (last.intercept.is_infinite() || last.slope > 0) return TruthValue::infinity();
        return last.intercept;
    }
    return quantale_.truncate(extend(pieces_[piece_index(pieces_, r.value())], r.value()));
}

Modulus compose(const Modulus& outer, const Modulus& inner) {
    require_same_quantale(outer, inner);
    const Quantale& q = inner.quantale();
    auto outer_pieces = outer.pieces();
    auto inner_pieces = inner.pieces();
    const TruthValue outer_at_top = outer(q.top());

    std::vector<Piece> out;
    for (std::size_t i = 0; i < inner_pieces.size(); ++i) {
        const Piece& p = inner_pieces[i];
        if (p.intercept.is_infinite()) {
            out.push_back(Piece{p.breakpoint, outer_at_top, Rational(0)});
            continue;
        }
        const bool last = i + 1 == inner_pieces.size();
        std::optional<Rational> end =
            last ? carrier_end(q) : std::optional<Rational>(inner_pieces[i + 1].breakpoint);

        std::vector<Rational> starts{p.breakpoint};
        if (p.slope > 0) {
            // Preimages of the outer breakpoints under this affine piece.
            for (const Piece& o : outer_pieces) {
                if (!(o.breakpoint > p.intercept.value())) continue;
                Rational r = p.breakpoint + (o.breakpoint - p.intercept.value()) / p.slope;
                bool inside = !end || r < *end || (last && q.bounded() && r == *end);
                if (inside) starts.push_back(std::move(r));
            }
        }
        for (const Rational& s : starts) {
            Rational v = p.intercept.value() + p.slope * (s - p.breakpoint);
            Segment seg = segment_at(outer_pieces, v);
            if (seg.value.is_infinite()) {
                out.push_back(Piece{s, TruthValue::infinity(), Rational(0)});
            } else {
                out.push_back(Piece{s, seg.value, seg.slope * p.slope});
            }
        }
    }
    return Modulus::from_pieces(std::move(out), q);
}

Modulus combine(Combine op, const Modulus& a, const Modulus& b) {
    require_same_quantale(a, b);
    const Quantale& q = a.quantale();
    std::vector<Rational> starts = merged_breakpoints(a.pieces(), b.pieces());

    std::vector<Piece> out;
    for (std::size_t k = 0; k < starts.size(); ++k) {
        const Rational& s = starts[k];
        Segment fa = segment_at(a.pieces(), s);
        Segment fb = segment_at(b.pieces(), s);
        if (fa.value.is_infinite() || fb.value.is_infinite()) {
            out.push_back(Piece{s, TruthValue::infinity(), Rational(0)});
            continue;
        }
        if (op == Combine::Add) {
            out.push_back(Piece{s, TruthValue(fa.value.value() + fb.value.value()),
                                fa.slope + fb.slope});
            continue;
        }
        if (fa.value >= fb.value && fa.slope >= fb.slope) {
            out.push_back(Piece{s, fa.value, fa.slope});
        } else if (fb.value >= fa.value && fb.slope >= fa.slope) {
            out.push_back(Piece{s, fb.value, fb.slope});
        } else {
            // The lines cross; the one larger at s loses after the crossing.
            const Segment& first = fa.value > fb.value ? fa : fb;
            const Segment& second = fa.value > fb.value ? fb : fa;
            Rational x = s + (first.value.value() - second.value.value()) /
                                 (second.slope - first.slope);
            out.push_back(Piece{s, first.value, first.slope});
            std::optional<Rational> end = interval_end(starts, k, q);
            if (!end || x < *end) {
                TruthValue at_x(second.value.value() + second.slope * (x - s));
                out.push_back(Piece{x, at_x, second.slope});
            }
        }
    }
    return Modulus::from_pieces(std::move(out), q);
}

bool leq(const Modulus& a, const Modulus& b) {
    require_same_quantale(a, b);
    const Quantale& q = a.quantale();
    std::vector<Rational> starts = merged_breakpoints(a.pieces(), b.pieces());
    for (std::size_t k = 0; k < starts.size(); ++k) {
        const Rational& s = starts[k];
        Segment fa = segment_at(a.pieces(), s);
        Segment fb = segment_at(b.pieces(), s);
        if (fa.value > fb.value) return false;
        std::optional<Rational> end = interval_end(starts, k, q);
        if (end) {
            auto limit = [&](const Segment& g) {
                if (g.value.is_infinite()) return TruthValue::infinity();
                return TruthValue(g.value.value() + g.slope * (*end - s));
            };
            if (q.truncate(limit(fa)) > q.truncate(limit(fb))) return false;
        } else {
            if (fb.value.is_infinite()) continue;
            if (fa.value.is_infinite() || fa.slope > fb.slope) return false;
        }
    }
    return true;
}

Moduloid parse_moduloid(std::string_view text) {
    if (text == "E1" || text == "e1") return Moduloid::E1;
    if (text == "EL" || text == "el") return Moduloid::EL;
    if (text == "EuPL" || text == "Eu" || text == "eu" || text == "eupl") return Moduloid::EuPL;
    throw ParseError("unknown moduloid '" + std::string(text) + "' (expected E1, EL or EuPL)");
}

std::string to_string(Moduloid e) {
    switch (e) {
    case Moduloid::E1: return "E1";
    case Moduloid::EL: return "EL";
    case Moduloid::EuPL: return "EuPL";
    }
    return "?";
}

bool contains(Moduloid e, const Modulus& m) {
    switch (e) {
    case Moduloid::E1:
        return m == Modulus::identity(m.quantale());
    case Moduloid::EL: {
        const Piece& first = m.pieces().front();
        if (first.intercept.is_infinite() || first.slope < 1) return false;
        return m == Modulus::lipschitz(first.slope, m.quantale());
    }
    case Moduloid::EuPL:
        return true;
    }
    return false;
}

bool tensor_closed(Moduloid e) noexcept { return e != Moduloid::E1; }

Modulus least_member_above(Moduloid e, const Modulus& m) {
    const Quantale& q = m.quantale();
    switch (e) {
    case Moduloid::EuPL:
        return m;
    case Moduloid::E1:
        if (leq(m, Modulus::identity(q))) return Modulus::identity(q);
        throw PreconditionError("no member of E1 dominates modulus " + to_string(m));
    case Moduloid::EL: {
        // sup of m(r)/r over r > 0; on an affine piece the ratio is monotone,
        // so only interval ends matter.
        Rational k = 1;
        auto pieces = m.pieces();
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            const Piece& p = pieces[i];
            if (p.intercept.is_infinite()) {
                throw PreconditionError("no Lipschitz modulus dominates an infinite tail");
            }
            if (p.breakpoint == 0) {
                k = std::max(k, p.slope);
            } else {
                k = std::max(k, Rational(p.intercept.value() / p.breakpoint));
            }
            std::optional<Rational> end = i + 1 < pieces.size()
                                              ? std::optional<Rational>(pieces[i + 1].breakpoint)
                                              : carrier_end(q);
            if (end) {
                if (*end > 0) k = std::max(k, Rational(extend(p, *end).value() / *end));
            } else {
                k = std::max(k, p.slope);
            }
        }
        return Modulus::lipschitz(k, q);
    }
    }
    return m;
}

Modulus parse_modulus_spec(std::string_view text, Quantale q) {
    if (text == "id" || text == "identity") return Modulus::identity(q);
    if (text == "zero") return Modulus::zero(q);
    if (text.starts_with("lip:")) return Modulus::lipschitz(parse_rational(text.substr(4)), q);
    if (text.starts_with("step:")) {
        std::vector<std::pair<Rational, TruthValue>> jumps;
        std::string_view rest = text.substr(5);
        while (!rest.empty()) {
            std::size_t comma = rest.find(',');
            std::string_view item = rest.substr(0, comma);
            std::size_t eq = item.find('=');
            if (eq == std::string_view::npos) {
                throw ParseError("step modulus entries must look like r=v, got '" +
                                 std::string(item) + "'");
            }
            jumps.emplace_back(parse_rational(item.substr(0, eq)), parse_truth(item.substr(eq + 1)));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        return Modulus::step(std::move(jumps), q);
    }
    throw ParseError("unknown modulus '" + std::string(text) +
                     "' (expected id, zero, lip:K, step:r=v,... or a piece array)");
}

std::string to_string(const Modulus& m) {
    const Quantale& q = m.quantale();
    if (m == Modulus::identity(q)) return "id";
    if (m == Modulus::zero(q)) return "zero";
    if (contains(Moduloid::EL, m)) return "lip:" + to_string(m.pieces().front().slope);
    std::ostringstream os;
    os << '[';
    bool first = true;
    for (const Piece& p : m.pieces()) {
        if (!first) os << ", ";
        first = false;
        os << '(' << to_string(p.breakpoint) << ", " << to_string(p.intercept) << ", "
           << to_string(p.slope) << ')';
    }
    os << ']';
    return os.str();
}

} // namespace contsem
