#include "contsem/random.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace contsem::gen {

Rational grid_rational(Rng& rng, long den, long lo, long hi) {
    long k = lo + static_cast<long>(uniform(rng, static_cast<std::size_t>(hi - lo + 1)));
    return Rational(k) / Rational(den);
}

SpacePtr random_space(Rng& rng, const std::string& id, std::size_t n, long den, bool allow_zero,
                      Quantale q) {
    std::vector<TruthValue> d(n * n, TruthValue(0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            long lo = allow_zero && coin(rng, 4) ? 0 : 1;
            TruthValue w(grid_rational(rng, den, lo, den));
            d[i * n + j] = w;
            d[j * n + i] = w;
        }
    }
    // Floyd-Warshall closure turns any symmetric weights into a pseudometric.
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                TruthValue via = q.tensor(d[i * n + k], d[k * n + j]);
                if (via < d[i * n + j]) d[i * n + j] = via;
            }
        }
    }
    std::vector<std::string> points;
    for (std::size_t i = 0; i < n; ++i) points.push_back(id + std::to_string(i));
    return make_space(id, std::move(points), std::move(d), q);
}

MetricMap random_map(Rng& rng, const SpacePtr& source, const SpacePtr& target) {
    const std::size_t n = source->size();
    std::vector<std::size_t> assignment(n);
    for (std::size_t i = 0; i < n; ++i) {
        assignment[i] = uniform(rng, target->size());
        for (std::size_t j = 0; j < i; ++j) {
            if (source->distance(i, j) == TruthValue(0)) {
                assignment[i] = assignment[j];
                break;
            }
        }
    }
    return MetricMap(source, target, std::move(assignment));
}

Modulus random_modulus(Rng& rng, long den, Quantale q) {
    switch (uniform(rng, 4)) {
    case 0:
        return Modulus::lipschitz(grid_rational(rng, 2, 1, 8), q);
    case 1: {
        std::vector<std::pair<Rational, TruthValue>> jumps;
        TruthValue level(0);
        for (long k = 1; k <= den; ++k) {
            if (!coin(rng, 3)) continue;
            Rational bump = grid_rational(rng, den, 1, std::max(1L, den / 2));
            level = q.truncate(TruthValue(level.value() + bump));
            jumps.emplace_back(Rational(k) / Rational(den), level);
        }
        return Modulus::step(std::move(jumps), q);
    }
    case 2:
        return Modulus::identity(q);
    default: {
        std::vector<Piece> pieces{Piece{Rational(0), TruthValue(0), grid_rational(rng, 2, 0, 6)}};
        for (long k = 1; k < den; ++k) {
            if (!coin(rng, 2)) continue;
            const Piece& prev = pieces.back();
            Rational at = Rational(k) / Rational(den);
            Rational level = prev.intercept.value() + prev.slope * (at - prev.breakpoint);
            if (coin(rng, 2)) level += grid_rational(rng, den, 0, 2);
            pieces.push_back(Piece{at, TruthValue(level), grid_rational(rng, 2, 0, 6)});
        }
        return Modulus::from_pieces(std::move(pieces), q);
    }
    }
}

Modulus random_grid_modulus(Rng& rng) {
    switch (uniform(rng, 3)) {
    case 0: return Modulus::identity();
    case 1: return Modulus::lipschitz(2);
    default: return Modulus::lipschitz(Rational(1 + static_cast<long>(uniform(rng, 4))));
    }
}

Predicate random_predicate(Rng& rng, const SpacePtr& space, const Modulus& eps, long den) {
    std::vector<TruthValue> thresholds(space->size());
    for (auto& t : thresholds) t = TruthValue(grid_rational(rng, den, 0, den));
    return envelope(IndexedFamily(space, std::move(thresholds)), eps);
}

namespace {

struct Word {
    std::string name;
    std::size_t source;
    std::size_t target;
    std::vector<std::size_t> generators;
};

/// Every path in a DAG of generator arrows, identities excluded.
std::vector<Word> paths(const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    std::vector<Word> out;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        out.push_back({"f" + std::to_string(e), edges[e].first, edges[e].second, {e}});
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t e = 0; e < edges.size(); ++e) {
            if (edges[e].first != out[i].target) continue;
            Word w = out[i];
            w.name = "f" + std::to_string(e) + "." + w.name;
            w.target = edges[e].second;
            w.generators.push_back(e);
            out.push_back(std::move(w));
        }
        if (out.size() > 6) break;
    }
    return out;
}

RandomCategory free_category(Rng& rng) {
    for (;;) {
        std::size_t n = 1 + uniform(rng, 3);
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                std::size_t k = uniform(rng, 3) == 0 ? 0 : 1 + uniform(rng, 3) / 2;
                for (std::size_t e = 0; e < k; ++e) {
                    edges.emplace_back(coin(rng) ? i : j, 0);
                    edges.back().second = edges.back().first == i ? j : i;
                }
            }
        }
        std::vector<Word> ws = paths(edges);
        if (ws.size() + n > 6) continue;

        std::vector<std::string> objects;
        for (std::size_t i = 0; i < n; ++i) objects.push_back(std::string(1, static_cast<char>('a' + i)));
        std::vector<MorphismDecl> decls;
        for (const Word& w : ws) decls.push_back({w.name, objects[w.source], objects[w.target]});
        std::vector<CompositeDecl> comp;
        for (const Word& f : ws) {
            for (const Word& g : ws) {
                if (f.target != g.source) continue;
                std::vector<std::size_t> gens = f.generators;
                gens.insert(gens.end(), g.generators.begin(), g.generators.end());
                for (const Word& h : ws) {
                    if (h.generators == gens) comp.push_back({g.name, f.name, h.name});
                }
            }
        }
        RandomCategory rc{make_category(objects, decls, comp), {}};
        for (std::size_t m = 0; m < rc.category->morphism_count(); ++m) {
            auto it = std::find_if(ws.begin(), ws.end(),
                                   [&](const Word& w) { return w.name == rc.category->arrow(m).id; });
            rc.words.emplace_back();
            if (it == ws.end()) continue;
            for (std::size_t e : it->generators) {
                rc.words.back().push_back(*rc.category->morphism_index("f" + std::to_string(e)));
            }
        }
        return rc;
    }
}

/// Monoids on one object "a" from a composition rule on named elements.
RandomCategory monoid(const std::vector<std::string>& elements,
                      const std::vector<std::vector<std::string>>& words,
                      const std::function<std::string(const std::string&, const std::string&)>& mul) {
    std::vector<MorphismDecl> decls;
    for (const std::string& e : elements) decls.push_back({e, "a", "a"});
    std::vector<CompositeDecl> comp;
    for (const std::string& g : elements) {
        for (const std::string& f : elements) comp.push_back({g, f, mul(g, f)});
    }
    RandomCategory rc{make_category({"a"}, decls, comp), {}};
    rc.words.assign(rc.category->morphism_count(), {});
    for (std::size_t i = 0; i < elements.size(); ++i) {
        std::size_t m = *rc.category->morphism_index(elements[i]);
        for (const std::string& gname : words[i]) {
            rc.words[m].push_back(*rc.category->morphism_index(gname));
        }
    }
    return rc;
}

RandomCategory glued_category() {
    // An idempotent e on a and a free arrow f: b -> a.
    std::vector<MorphismDecl> decls{{"e", "a", "a"}, {"f", "b", "a"}, {"e.f", "b", "a"}};
    std::vector<CompositeDecl> comp{{"e", "e", "e"}, {"e", "f", "e.f"}, {"e", "e.f", "e.f"}};
    RandomCategory rc{make_category({"a", "b"}, decls, comp), {}};
    const FinCategory& c = *rc.category;
    rc.words.assign(c.morphism_count(), {});
    std::size_t e = *c.morphism_index("e");
    std::size_t f = *c.morphism_index("f");
    rc.words[e] = {e};
    rc.words[f] = {f};
    rc.words[*c.morphism_index("e.f")] = {f, e};
    return rc;
}

std::vector<std::size_t> random_nonexpansive(Rng& rng, const FiniteMetricSpace& from,
                                             const FiniteMetricSpace& to, bool may_be_identity) {
    if (may_be_identity && coin(rng, 3)) {
        std::vector<std::size_t> id(from.size());
        for (std::size_t i = 0; i < id.size(); ++i) id[i] = i;
        return id;
    }
    for (int attempt = 0; attempt < 20; ++attempt) {
        std::vector<std::size_t> a(from.size());
        for (auto& y : a) y = uniform(rng, to.size());
        bool ok = true;
        for (std::size_t i = 0; i < a.size() && ok; ++i) {
            for (std::size_t j = 0; j < a.size() && ok; ++j) {
                ok = to.distance(a[i], a[j]) <= from.distance(i, j);
            }
        }
        if (ok) return a;
    }
    return std::vector<std::size_t>(from.size(), uniform(rng, to.size()));
}

} // namespace

RandomCategory random_category(Rng& rng) {
    switch (uniform(rng, 4)) {
    case 0:
    case 1:
        return free_category(rng);
    case 2: {
        switch (uniform(rng, 5)) {
        case 0:
            return monoid({}, {}, nullptr);
        case 1:
            return monoid({"e"}, {{"e"}}, [](auto&, auto&) { return std::string("e"); });
        case 2:
            return monoid({"g"}, {{"g"}}, [](auto&, auto&) { return std::string("1_a"); });
        case 3:
            return monoid({"g", "h"}, {{"g"}, {"g", "g"}}, [](const std::string& x, const std::string& y) {
                int n = (x == "g" ? 1 : 2) + (y == "g" ? 1 : 2);
                return n % 3 == 0 ? std::string("1_a") : n % 3 == 1 ? std::string("g") : std::string("h");
            });
        default:
            // Left-zero band with a unit adjoined: x after y is x.
            return monoid({"p", "s"}, {{"p"}, {"s"}},
                          [](const std::string& x, const std::string&) { return x; });
        }
    }
    default:
        return glued_category();
    }
}

PresheafPtr random_presheaf(Rng& rng, const RandomCategory& rc, std::size_t max_points, long den) {
    const FinCategory& c = *rc.category;
    std::vector<SpacePtr> spaces;
    for (std::size_t a = 0; a < c.object_count(); ++a) {
        spaces.push_back(random_space(rng, "F" + c.object(a) + "_", 1 + uniform(rng, max_points), den,
                                      coin(rng, 4)));
    }
    for (int attempt = 0; attempt < 30; ++attempt) {
        std::vector<std::vector<std::size_t>> r(c.morphism_count());
        for (std::size_t m = 0; m < c.morphism_count(); ++m) {
            const auto& w = rc.words[m];
            if (w.size() != 1 || w[0] != m) continue;
            const Arrow& ar = c.arrow(m);
            r[m] = random_nonexpansive(rng, *spaces[ar.target], *spaces[ar.source],
                                       ar.source == ar.target);
        }
        for (std::size_t m = 0; m < c.morphism_count(); ++m) {
            const auto& w = rc.words[m];
            if (w.size() == 1 && w[0] == m) continue;
            if (w.empty()) continue;
            // Restriction along a word applies the last generator first.
            const Arrow& ar = c.arrow(m);
            r[m].resize(spaces[ar.target]->size());
            for (std::size_t x = 0; x < r[m].size(); ++x) {
                std::size_t p = x;
                for (auto it = w.rbegin(); it != w.rend(); ++it) p = r[*it][p];
                r[m][x] = p;
            }
        }
        auto f = std::make_shared<const MetricPresheaf>(rc.category, spaces, std::move(r));
        if (!validate_presheaf(*f)) return f;
    }
    // Constant presheaf on one space.
    std::vector<std::vector<std::size_t>> r(c.morphism_count());
    std::vector<std::size_t> id(spaces[0]->size());
    std::iota(id.begin(), id.end(), std::size_t{0});
    for (auto& row : r) row = id;
    return make_presheaf(rc.category, std::vector<SpacePtr>(c.object_count(), spaces[0]), std::move(r));
}

PresheafPredicate random_presheaf_predicate(Rng& rng, const PresheafPtr& f, long den) {
    std::vector<std::vector<TruthValue>> th;
    for (const SpacePtr& s : f->spaces()) {
        std::vector<TruthValue> row;
        for (std::size_t x = 0; x < s->size(); ++x) row.emplace_back(grid_rational(rng, den, 0, den));
        th.push_back(std::move(row));
    }
    return presheaf_envelope(f, th);
}

} // namespace contsem::gen
