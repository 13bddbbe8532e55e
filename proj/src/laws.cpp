#include "contsem/laws.hpp"

#include "contsem/error.hpp"
#include "contsem/quantifier.hpp"
#include "contsem/subobject.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace contsem::laws {

namespace {

constexpr std::size_t kWitnessesPerLaw = 3;

std::string str(const TruthValue& v) { return to_string(v); }

std::string join_values(std::span<const TruthValue> vs) {
    std::string out = "[";
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ", ";
        out += to_string(vs[i]);
    }
    return out + "]";
}

std::string join_labels(const Subobject& s) {
    std::string out = "{";
    auto ls = s.labels();
    for (std::size_t i = 0; i < ls.size(); ++i) {
        if (i) out += ",";
        out += ls[i];
    }
    return out + "}";
}

std::string assignment_text(const MetricMap& f) {
    std::string out;
    for (std::size_t x = 0; x < f.assignment().size(); ++x) {
        if (x) out += ",";
        out += f.source()->label(x) + "->" + f.target()->label(f(x));
    }
    return "{" + out + "}";
}

std::size_t or_default(std::size_t v, std::size_t d) { return v == 0 ? d : v; }

TruthValue frac(long p, long q) { return TruthValue(Rational(p) / Rational(q)); }

std::vector<TruthValue> grid(long den) {
    std::vector<TruthValue> out;
    for (long k = 0; k <= den; ++k) out.push_back(frac(k, den));
    return out;
}

SpacePtr space_of_size(gen::Rng& rng, const std::string& id, std::size_t n, long den,
                       bool allow_zero = false) {
    if (n == 0) return make_space(id, {}, {});
    return gen::random_space(rng, id, n, den, allow_zero);
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

/// Every point function; the spaces used here have no zero distances, so
/// each one carries a modulus.
std::vector<MetricMap> all_maps(const SpacePtr& x, const SpacePtr& y) {
    std::vector<MetricMap> out;
    if (y->empty() && !x->empty()) return out;
    std::vector<std::size_t> a(x->size(), 0);
    while (true) {
        out.emplace_back(x, y, a);
        std::size_t i = 0;
        while (i < a.size() && ++a[i] == y->size()) a[i++] = 0;
        if (i == a.size()) break;
    }
    return out;
}

/// Every value vector over n points drawn from vals.
std::vector<std::vector<TruthValue>> all_vectors(std::size_t n, const std::vector<TruthValue>& vals) {
    std::vector<std::vector<TruthValue>> out{{}};
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::vector<TruthValue>> next;
        for (const auto& v : out) {
            for (const auto& t : vals) {
                auto w = v;
                w.push_back(t);
                next.push_back(std::move(w));
            }
        }
        out = std::move(next);
    }
    return out;
}

std::vector<Predicate> all_grid_predicates(const SpacePtr& x, const Modulus& eps, long den) {
    std::vector<Predicate> out;
    for (auto& v : all_vectors(x->size(), grid(den))) {
        if (!continuity_witness(*x, v, eps)) out.emplace_back(x, std::move(v), eps);
    }
    return out;
}

// Reference relaxation, independent of the Dijkstra envelope.
std::vector<TruthValue> bellman_ford(const FiniteMetricSpace& x, std::vector<TruthValue> value,
                                     const Modulus& eps) {
    const Quantale& q = x.quantale();
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t a = 0; a < x.size(); ++a) {
            for (std::size_t b = 0; b < x.size(); ++b) {
                TruthValue c = q.tensor(value[a], eps(x.distance(a, b)));
                if (c < value[b]) {
                    value[b] = c;
                    changed = true;
                }
            }
        }
    }
    return value;
}

} // namespace

bool Report::check(const std::string& law, bool ok, const std::function<std::string()>& detail) {
    LawTally& t = laws_[law];
    ++t.checks;
    if (!ok) {
        ++t.failures;
        if (t.failures <= kWitnessesPerLaw) witnesses_.push_back({law, detail()});
    }
    return ok;
}

std::size_t Report::checks() const {
    std::size_t n = 0;
    for (const auto& [_, t] : laws_) n += t.checks;
    return n;
}

std::size_t Report::failures() const {
    std::size_t n = 0;
    for (const auto& [_, t] : laws_) n += t.failures;
    return n;
}

void Report::merge(const Report& other) {
    for (const auto& [name, t] : other.laws_) {
        laws_[name].checks += t.checks;
        laws_[name].failures += t.failures;
    }
    witnesses_.insert(witnesses_.end(), other.witnesses_.begin(), other.witnesses_.end());
}

// ---------------------------------------------------------------- classifier

Report classifier_suite(const Params& p) {
    Report rep("classifier");
    gen::Rng rng(p.seed);
    const std::size_t spaces = or_default(p.count, 200);
    const std::size_t size = or_default(p.size, 6);
    const long den = 8;

    for (std::size_t i = 0; i < spaces; ++i) {
        SpacePtr x = gen::random_space(rng, "X", 1 + gen::uniform(rng, size), den, gen::coin(rng, 4));
        Modulus eps = gen::random_modulus(rng, den);
        Predicate pr = gen::random_predicate(rng, x, eps, den);
        IndexedFamily fam = to_family(pr);
        rep.check("to_predicate after to_family", to_predicate(fam, eps) == pr, [&] {
            return "values " + join_values(pr.values()) + " at " + to_string(eps);
        });
        rep.check("to_family after to_predicate", to_family(to_predicate(fam, eps)) == fam, [&] {
            return "thresholds " + join_values(fam.thresholds()) + " at " + to_string(eps);
        });
        rep.check("family is an eps-predicate", is_epsilon_predicate(fam, eps), [&] {
            return "values " + join_values(pr.values());
        });
    }

    const std::size_t pairs = std::max<std::size_t>(1, spaces / 2);
    for (std::size_t i = 0; i < pairs; ++i) {
        SpacePtr x = gen::random_space(rng, "X", 1 + gen::uniform(rng, size), den);
        SpacePtr w = gen::random_space(rng, "W", 1 + gen::uniform(rng, size), den);
        Predicate pr = gen::random_predicate(rng, x, gen::random_grid_modulus(rng), den);
        const std::size_t n = least_compatible_grid(pr);
        SpacePtr gr = make_grid(n);
        MetricMap f = classifying_map(pr, gr, n);
        MetricMap g = gen::random_map(rng, w, x);
        Predicate truth = truth_predicate(gr);

        IndexedFamily rf = to_family(predicate_pullback(f, truth));
        IndexedFamily rfg = to_family(predicate_pullback(compose_maps(f, g), truth));
        rep.check("classifying map pulls truth back to R", rf.thresholds().size() == pr.values().size() &&
                      std::equal(rf.thresholds().begin(), rf.thresholds().end(), pr.values().begin()),
                  [&] { return "values " + join_values(pr.values()); });
        for (long k = 0; k <= 2 * static_cast<long>(n); ++k) {
            TruthValue r = frac(k, 2 * static_cast<long>(n));
            rep.check("naturality R_(f.g) = g*R_f", rfg.level(r) == pullback_sub(g, rf.level(r)), [&] {
                return "at r = " + str(r) + ", g = " + assignment_text(g) + ", values " +
                       join_values(pr.values());
            });
        }
        Predicate pulled = predicate_pullback(g, pr);
        MetricMap fg = classifying_map(pulled, gr, n);
        rep.check("f_(g*R) = f_R . g",
                  std::equal(fg.assignment().begin(), fg.assignment().end(),
                             compose_maps(f, g).assignment().begin()),
                  [&] { return "g = " + assignment_text(g); });
    }
    return rep;
}

// ------------------------------------------------------------------ envelope

Report envelope_suite(const Params& p) {
    Report rep("envelope");
    gen::Rng rng(p.seed);
    const std::size_t instances = or_default(p.count, 500);
    const std::size_t size = or_default(p.size, 30);

    // Exhaustive Galois biconditional: L(R) <= P iff R <= P.
    const long den = 4;
    std::vector<SpacePtr> spaces{
        gen::random_space(rng, "A", 3, den),
        gen::random_space(rng, "B", 3, den),
        gen::random_space(rng, "C", 3, den, true),
        make_space("U", {"p", "q", "r"},
                   {frac(0, 1), frac(1, 2), frac(1, 2), frac(1, 2), frac(0, 1), frac(1, 2), frac(1, 2),
                    frac(1, 2), frac(0, 1)}),
    };
    std::vector<Modulus> moduli{Modulus::identity(), Modulus::lipschitz(2), Modulus::zero(),
                                Modulus::step({{Rational(1) / 4, frac(1, 2)}, {Rational(1) / 2, frac(1, 1)}})};
    auto values = all_vectors(3, grid(den));
    for (const SpacePtr& x : spaces) {
        for (const Modulus& eps : moduli) {
            std::vector<Predicate> preds = all_grid_predicates(x, eps, den);
            std::vector<IndexedFamily> pfams;
            for (const auto& pr : preds) pfams.push_back(to_family(pr));
            for (const auto& th : values) {
                for (std::size_t mask = 0; mask < 8; ++mask) {
                    std::vector<bool> att{bool(mask & 1), bool(mask & 2), bool(mask & 4)};
                    IndexedFamily r(x, th, att);
                    Predicate env = envelope(r, eps);
                    rep.check("envelope equals the relaxation fixpoint",
                              std::equal(env.values().begin(), env.values().end(),
                                         bellman_ford(*x, th, eps).begin()),
                              [&] { return "thresholds " + join_values(th) + " at " + to_string(eps); });
                    for (std::size_t k = 0; k < preds.size(); ++k) {
                        bool lhs = leq(env, preds[k]);
                        bool rhs = leq(r, pfams[k]);
                        rep.check("envelope adjunction", lhs == rhs, [&] {
                            return "space " + x->id() + ", thresholds " + join_values(th) +
                                   ", P = " + join_values(preds[k].values()) + " at " + to_string(eps);
                        });
                    }
                }
            }
        }
    }

    // Dijkstra against Bellman-Ford on larger random instances.
    for (std::size_t i = 0; i < instances; ++i) {
        const std::size_t n = 1 + gen::uniform(rng, size);
        SpacePtr x = gen::random_space(rng, "X", n, 8, gen::coin(rng, 3));
        Modulus eps = gen::random_modulus(rng, 8);
        std::vector<TruthValue> th(n);
        std::vector<bool> att(n);
        for (std::size_t k = 0; k < n; ++k) {
            th[k] = gen::grid_rational(rng, 8, 0, 8);
            att[k] = !gen::coin(rng, 4);
        }
        IndexedFamily r(x, th, att);
        Predicate env = envelope(r, eps);
        auto oracle = bellman_ford(*x, th, eps);
        rep.check("envelope equals the relaxation fixpoint",
                  std::equal(env.values().begin(), env.values().end(), oracle.begin()), [&] {
                      return std::to_string(n) + " points at " + to_string(eps) + ": got " +
                             join_values(env.values()) + ", expected " + join_values(oracle);
                  });
        rep.check("envelope lies above the family", leq(r, to_family(env)),
                  [&] { return "thresholds " + join_values(th); });
    }
    return rep;
}

// ---------------------------------------------------------------- quantifier

Report quantifier_suite(const Params& p) {
    Report rep("quantifier");
    gen::Rng rng(p.seed);
    const std::size_t instances = or_default(p.count, 300);
    const std::size_t size = or_default(p.size, 4);

    for (std::size_t i = 0; i < instances; ++i) {
        SpacePtr y = gen::random_space(rng, "Y", 1 + gen::uniform(rng, size), 8, gen::coin(rng, 4));
        SpacePtr x = gen::random_space(rng, "X", 1 + gen::uniform(rng, size), 8, gen::coin(rng, 4));
        SpacePtr yx = product(y, x);
        MetricMap pi = projection_map(yx, 1);
        Modulus eps = gen::coin(rng) ? gen::random_grid_modulus(rng) : gen::random_modulus(rng, 8);
        Predicate r = gen::random_predicate(rng, yx, eps, 8);
        Predicate inf = quantify_direct(Quantifier::Inf, pi, r);
        Predicate sup = quantify_direct(Quantifier::Sup, pi, r);
        Predicate ex = exists_along(pi, r);
        Predicate fa = forall_proj(pi, r);
        rep.check("exists equals inf", ex == inf, [&] {
            return "R = " + join_values(r.values()) + ": exists " + join_values(ex.values()) +
                   ", inf " + join_values(inf.values());
        });
        rep.check("forall equals sup", fa == sup, [&] {
            return "R = " + join_values(r.values()) + ": forall " + join_values(fa.values()) +
                   ", sup " + join_values(sup.values());
        });
    }

    // Both adjunctions, exhaustively at 2 x 2 points and grid 1/4.
    const long den = 4;
    for (int trial = 0; trial < 3; ++trial) {
        SpacePtr y = gen::random_space(rng, "Y", 2, den);
        SpacePtr x = gen::random_space(rng, "X", 2, den);
        SpacePtr yx = product(y, x);
        MetricMap pi = projection_map(yx, 1);
        for (const Modulus& eps : {Modulus::identity(), Modulus::lipschitz(2)}) {
            auto rs = all_grid_predicates(yx, eps, den);
            auto ps = all_grid_predicates(x, eps, den);
            std::vector<Predicate> pulled;
            for (const auto& pr : ps) pulled.push_back(predicate_pullback(pi, pr));
            for (const auto& r : rs) {
                Predicate ex = exists_along(pi, r);
                Predicate fa = forall_proj(pi, r);
                for (std::size_t k = 0; k < ps.size(); ++k) {
                    rep.check("exists -| pullback", leq(ex, ps[k]) == leq(r, pulled[k]), [&] {
                        return "R = " + join_values(r.values()) + ", P = " + join_values(ps[k].values());
                    });
                    rep.check("pullback -| forall", leq(pulled[k], r) == leq(ps[k], fa), [&] {
                        return "R = " + join_values(r.values()) + ", P = " + join_values(ps[k].values());
                    });
                }
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------- lattice suites

Report frobenius_suite(const Params& p) {
    Report rep("frobenius");
    gen::Rng rng(p.seed);
    const std::size_t size = std::min<std::size_t>(or_default(p.size, 3), 4);
    std::vector<SpacePtr> spaces;
    for (std::size_t n = 0; n <= size; ++n) spaces.push_back(space_of_size(rng, "S" + std::to_string(n), n, 4));

    for (const SpacePtr& x : spaces) {
        auto subs = all_subsets(x);
        for (const auto& a : subs) {
            for (const auto& b : subs) {
                for (const auto& c : subs) {
                    rep.check("heyting adjunction",
                              leq(meet(a, b), c) == leq(a, heyting_implies(b, c)), [&] {
                                  return "A = " + join_labels(a) + ", B = " + join_labels(b) +
                                         ", C = " + join_labels(c);
                              });
                    rep.check("meet distributes over join",
                              meet(a, join(b, c)) == join(meet(a, b), meet(a, c)), [&] {
                                  return "A = " + join_labels(a) + ", B = " + join_labels(b) +
                                         ", C = " + join_labels(c);
                              });
                }
            }
        }
    }

    for (const SpacePtr& x : spaces) {
        for (const SpacePtr& y : spaces) {
            auto xs = all_subsets(x);
            auto ys = all_subsets(y);
            for (const MetricMap& f : all_maps(x, y)) {
                for (const auto& a : xs) {
                    Subobject ex = exists_sub(f, a);
                    Subobject fa = forall_sub(f, a);
                    for (const auto& b : ys) {
                        auto where = [&] {
                            return "f = " + assignment_text(f) + ", A = " + join_labels(a) +
                                   ", B = " + join_labels(b);
                        };
                        Subobject pb = pullback_sub(f, b);
                        rep.check("exists -| pullback", leq(ex, b) == leq(a, pb), where);
                        rep.check("pullback -| forall", leq(pb, a) == leq(b, fa), where);
                        rep.check("frobenius", exists_sub(f, meet(a, pb)) == meet(ex, b), where);
                    }
                }
                for (const auto& b : ys) {
                    for (const auto& c : ys) {
                        rep.check("pullback preserves implication",
                                  pullback_sub(f, heyting_implies(b, c)) ==
                                      heyting_implies(pullback_sub(f, b), pullback_sub(f, c)),
                                  [&] {
                                      return "f = " + assignment_text(f) + ", B = " + join_labels(b) +
                                             ", C = " + join_labels(c);
                                  });
                    }
                }
            }
        }
    }
    return rep;
}

Report beck_chevalley_suite(const Params& p) {
    Report rep("beck-chevalley");
    gen::Rng rng(p.seed);
    const std::size_t size = std::min<std::size_t>(or_default(p.size, 3), 3);
    std::vector<SpacePtr> spaces;
    for (std::size_t n = 0; n <= size; ++n) spaces.push_back(space_of_size(rng, "S" + std::to_string(n), n, 4));

    for (const SpacePtr& x : spaces) {
        auto xs = all_subsets(x);
        for (const SpacePtr& y : spaces) {
            for (const SpacePtr& z : spaces) {
                auto fs = all_maps(x, z);
                auto gs = all_maps(y, z);
                for (const MetricMap& f : fs) {
                    for (const MetricMap& g : gs) {
                        PullbackSquare sq = pullback_square(f, g);
                        for (const auto& a : xs) {
                            auto where = [&] {
                                return "f = " + assignment_text(f) + ", g = " + assignment_text(g) +
                                       ", A = " + join_labels(a);
                            };
                            Subobject pa = pullback_sub(sq.to_left, a);
                            rep.check("g* exists_f = exists_q p*",
                                      pullback_sub(g, exists_sub(f, a)) == exists_sub(sq.to_right, pa),
                                      where);
                            rep.check("g* forall_f = forall_q p*",
                                      pullback_sub(g, forall_sub(f, a)) == forall_sub(sq.to_right, pa),
                                      where);
                        }
                    }
                }
            }
        }
    }
    return rep;
}

// --------------------------------------------------------------- metrization

namespace {

void metrization_clauses(Report& rep, const SpacePtr& z, const std::vector<TruthValue>& rs) {
    const std::size_t n = z->size();
    IndexedFamily d = to_family(distance_predicate(z));
    const SpacePtr& zz = d.space();
    const Quantale q = z->quantale();

    std::map<TruthValue, Subobject> levels;
    auto level = [&](const TruthValue& r) -> const Subobject& {
        auto it = levels.find(r);
        if (it == levels.end()) it = levels.emplace(r, d.level(r)).first;
        return it->second;
    };

    std::vector<std::size_t> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = i * n + i;
    MetricMap delta(z, zz, diag, Modulus::identity());
    rep.check("D(0) contains the diagonal", leq(exists_sub(delta, Subobject::full(z)), level(0)),
              [&] { return "space " + z->id(); });

    std::vector<std::size_t> sw(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sw[i * n + j] = j * n + i;
    MetricMap swap(zz, zz, sw, Modulus::identity());
    for (const auto& r : rs) {
        rep.check("swap fixes D(r)", pullback_sub(swap, level(r)) == level(r),
                  [&] { return "space " + z->id() + ", r = " + str(r); });
    }

    // pi_ij* D(r) meet pi_jk* D(s) <= pi_ik* D(r + s), over every choice of
    // coordinate roles in Z^3.
    static const std::size_t roles[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (const auto& r : rs) {
        for (const auto& s : rs) {
            const auto& dr = level(r).members();
            const auto& ds = level(s).members();
            const auto& drs = level(q.tensor(r, s)).members();
            for (const auto& role : roles) {
                bool ok = true;
                std::size_t bad[3] = {0, 0, 0};
                std::size_t pt[3];
                for (pt[0] = 0; pt[0] < n && ok; ++pt[0]) {
                    for (pt[1] = 0; pt[1] < n && ok; ++pt[1]) {
                        for (pt[2] = 0; pt[2] < n && ok; ++pt[2]) {
                            std::size_t i = pt[role[0]], j = pt[role[1]], k = pt[role[2]];
                            if (dr[i * n + j] && ds[j * n + k] && !drs[i * n + k]) {
                                ok = false;
                                bad[0] = i, bad[1] = j, bad[2] = k;
                            }
                        }
                    }
                }
                rep.check("composition inequality", ok, [&] {
                    return "space " + z->id() + ", r = " + str(r) + ", s = " + str(s) + " at (" +
                           z->label(bad[0]) + ", " + z->label(bad[1]) + ", " + z->label(bad[2]) + ")";
                });
            }
        }
    }

    // Meets at infima: finite sets, and sets of the form (r, top].
    for (std::size_t i = 0; i < rs.size(); ++i) {
        for (std::size_t j = i; j < rs.size(); ++j) {
            std::vector<Subobject> items{level(rs[i]), level(rs[j])};
            rep.check("D(inf) is the meet",
                      sub_lattice(LatticeOp::Meet, zz, items) == level(std::min(rs[i], rs[j])),
                      [&] { return "space " + z->id() + ", r = " + str(rs[i]) + ", s = " + str(rs[j]); });
        }
    }
    for (const auto& r : rs) {
        if (!(r < q.top())) continue;
        std::vector<Subobject> items;
        Rational step(1);
        for (int k = 0; k < 24; ++k) {
            step /= 2;
            items.push_back(level(q.truncate(TruthValue(r.value() + step))));
        }
        rep.check("D(r) is the meet above r", sub_lattice(LatticeOp::Meet, zz, items) == level(r),
                  [&] { return "space " + z->id() + ", r = " + str(r); });
    }
}

} // namespace

Report metrization_suite(const Params& p) {
    Report rep("metrization");
    gen::Rng rng(p.seed);
    const std::size_t trials = or_default(p.count, 20);
    const std::size_t size = or_default(p.size, 4);

    for (std::size_t t = 0; t < trials; ++t) {
        SpacePtr x = gen::random_space(rng, "X", 1 + gen::uniform(rng, size), 8, gen::coin(rng, 3));
        SpacePtr y = gen::random_space(rng, "Y", 1 + gen::uniform(rng, size), 8, gen::coin(rng, 3));
        SpacePtr xy = product(x, y);

        std::set<TruthValue> vals;
        for (const auto& v : grid(4)) vals.insert(v);
        for (const SpacePtr& s : {x, y}) {
            for (const auto& v : s->distances()) vals.insert(v);
        }
        std::vector<TruthValue> rs(vals.begin(), vals.end());

        metrization_clauses(rep, x, rs);
        metrization_clauses(rep, y, rs);
        metrization_clauses(rep, xy, rs);

        // D_{XxY}(r) = pi_XX* D_X(r) meet pi_YY* D_Y(r).
        IndexedFamily dxy = to_family(distance_predicate(xy));
        IndexedFamily dx = to_family(distance_predicate(x));
        IndexedFamily dy = to_family(distance_predicate(y));
        const std::size_t nx = x->size(), ny = y->size(), n = xy->size();
        std::vector<std::size_t> ax(n * n), ay(n * n);
        for (std::size_t u = 0; u < n; ++u) {
            for (std::size_t v = 0; v < n; ++v) {
                ax[u * n + v] = (u / ny) * nx + (v / ny);
                ay[u * n + v] = (u % ny) * ny + (v % ny);
            }
        }
        MetricMap pxx(dxy.space(), dx.space(), ax, Modulus::identity());
        MetricMap pyy(dxy.space(), dy.space(), ay, Modulus::identity());
        for (const auto& r : rs) {
            rep.check("product factorization",
                      dxy.level(r) == meet(pullback_sub(pxx, dx.level(r)), pullback_sub(pyy, dy.level(r))),
                      [&] { return std::to_string(nx) + " x " + std::to_string(ny) + " points, r = " + str(r); });
        }
    }
    return rep;
}

// ------------------------------------------------------------------ distance

Report distance_suite(const Params& p) {
    Report rep("distance");
    gen::Rng rng(p.seed);
    const std::size_t pairs = or_default(p.count, 100);
    const std::size_t size = or_default(p.size, 5);
    const Modulus two = combine(Combine::Add, Modulus::identity(), Modulus::identity());

    for (std::size_t i = 0; i < pairs; ++i) {
        SpacePtr x = gen::random_space(rng, "X", 1 + gen::uniform(rng, size), 8, gen::coin(rng, 3));
        SpacePtr y = gen::random_space(rng, "Y", 1 + gen::uniform(rng, size), 8, gen::coin(rng, 3));
        MetricMap f = gen::random_map(rng, x, y);
        MetricMap g = gen::random_map(rng, x, y);

        Predicate dy = distance_predicate(y);
        rep.check("distance is an (id + id)-predicate", is_epsilon_predicate(to_family(dy), two),
                  [&] { return "space of " + std::to_string(y->size()) + " points"; });
        rep.check("distance predicate declares id + id", dy.modulus() == two,
                  [&] { return to_string(dy.modulus()); });

        Predicate pd = pair_distance_predicate(f, g);
        Modulus want = combine(Combine::Add, f.modulus(), g.modulus());
        bool values_ok = true;
        for (std::size_t k = 0; k < x->size(); ++k) values_ok &= pd.value(k) == y->distance(f(k), g(k));
        rep.check("pair distance values", values_ok,
                  [&] { return "f = " + assignment_text(f) + ", g = " + assignment_text(g); });
        rep.check("pair distance is an (eps_f + eps_g)-predicate",
                  is_epsilon_predicate(to_family(pd), want) && pd.modulus() == want, [&] {
                      return "f = " + assignment_text(f) + ", g = " + assignment_text(g) + ", modulus " +
                             to_string(want);
                  });
    }
    return rep;
}

// ------------------------------------------------------------------ presheaf

Report presheaf_suite(const Params& p) {
    Report rep("presheaf");
    gen::Rng rng(p.seed);
    const std::size_t instances = or_default(p.count, 100);
    const std::size_t size = or_default(p.size, 4);
    const long den = 4;

    for (std::size_t i = 0; i < instances; ++i) {
        auto rc = gen::random_category(rng);
        PresheafPtr f = gen::random_presheaf(rng, rc, size, den);
        const FinCategory& c = *f->category();
        const Quantale q = f->quantale();
        PresheafPredicate r = gen::random_presheaf_predicate(rng, f, den);
        auto where = [&] {
            std::ostringstream os;
            os << "instance " << i << ": " << c.object_count() << " objects, " << c.morphism_count()
               << " morphisms, values";
            for (const auto& row : r.values()) os << " " << join_values(row);
            return os.str();
        };

        Classification phi = classify_presheaf(r);
        rep.check("classification is natural and 1-Lipschitz", !validate_classification(*f, phi), where);
        PresheafPredicate back = pullback_truth(f, phi);
        rep.check("pullback of truth recovers R", back == r, where);
        rep.check("classify after pullback_truth", classify_presheaf(back) == phi, where);

        // Uniqueness: moving any single threshold breaks naturality,
        // continuity, or the pulled-back predicate.
        for (std::size_t a = 0; a < phi.size(); ++a) {
            for (std::size_t x = 0; x < phi[a].size(); ++x) {
                for (std::size_t k = 0; k < phi[a][x].theta.size(); ++k) {
                    for (long gk = 0; gk <= den; ++gk) {
                        TruthValue v = frac(gk, den);
                        if (v == phi[a][x].theta[k]) continue;
                        Classification other = phi;
                        other[a][x].theta[k] = v;
                        bool broken = validate_classification(*f, other).has_value() ||
                                      !(pullback_truth(f, other) == r);
                        rep.check("classification is unique", broken, [&] {
                            return where() + "; theta " + std::to_string(k) + " of point " +
                                   std::to_string(x) + " at object " + c.object(a) + " moved to " + str(v);
                        });
                    }
                }
            }
        }

        // Truth values at each object: the classified elements of this
        // predicate and of a second one.
        PresheafPredicate r2 = gen::random_presheaf_predicate(rng, f, den);
        Classification phi2 = classify_presheaf(r2);
        for (std::size_t a = 0; a < c.object_count(); ++a) {
            std::vector<OmegaElement> els = phi[a];
            els.insert(els.end(), phi2[a].begin(), phi2[a].end());
            for (const auto& s1 : els) {
                for (const auto& s2 : els) {
                    TruthValue d12 = omega_distance(s1, s2, q);
                    for (const auto& s3 : els) {
                        rep.check("omega triangle inequality",
                                  omega_distance(s1, s3, q) <= q.tensor(d12, omega_distance(s2, s3, q)),
                                  where);
                    }
                    for (std::size_t m : c.morphisms_into(a)) {
                        rep.check("omega restriction is 1-Lipschitz",
                                  omega_distance(omega_restrict(m, s1), omega_restrict(m, s2), q) <= d12,
                                  [&] { return where() + "; along " + c.arrow(m).id; });
                    }
                }
            }
        }
    }
    return rep;
}

// ----------------------------------------------------------------------- dsl

dsl::Signature random_signature(gen::Rng& rng, std::size_t size) {
    dsl::Signature sig;
    SpacePtr x = gen::random_space(rng, "X", 1 + gen::uniform(rng, size), 8, gen::coin(rng, 4));
    SpacePtr y = gen::random_space(rng, "Y", 1 + gen::uniform(rng, size), 8, gen::coin(rng, 4));
    sig.spaces = {{"X", x}, {"Y", y}};
    sig.constants = {{"cX", {x, gen::uniform(rng, x->size())}}, {"cY", {y, gen::uniform(rng, y->size())}}};
    sig.maps.emplace("g", gen::random_map(rng, x, y));
    sig.maps.emplace("h", gen::random_map(rng, y, x));
    sig.maps.emplace("k", gen::random_map(rng, x, x));
    auto eps = [&] { return gen::coin(rng) ? gen::random_grid_modulus(rng) : gen::random_modulus(rng, 8); };
    sig.predicates.emplace("P", gen::random_predicate(rng, x, eps(), 8));
    sig.predicates.emplace("Q", gen::random_predicate(rng, y, eps(), 8));
    sig.predicates.emplace("R", gen::random_predicate(rng, product(x, y), eps(), 8));
    return sig;
}

dsl::Env random_env(gen::Rng& rng, const dsl::Signature& sig) {
    dsl::Env env;
    if (gen::coin(rng)) env.emplace_back("x", sig.spaces.at("X"));
    if (gen::coin(rng)) env.emplace_back("y", sig.spaces.at("Y"));
    if (env.size() == 2 && gen::coin(rng)) std::swap(env[0], env[1]);
    return env;
}

namespace {

dsl::Term random_term(gen::Rng& rng, const dsl::Signature& sig, const dsl::Env& env,
                      const SpacePtr& sort, std::size_t depth) {
    std::vector<dsl::Term> options;
    std::set<std::string> seen;
    for (const auto& [name, s] : env) {
        if (!seen.insert(name).second) continue; // shadowed
        if (same_space(s, sort)) options.push_back(dsl::Term{name, {}, {}});
    }
    for (const auto& [name, c] : sig.constants) {
        if (same_space(c.first, sort)) options.push_back(dsl::Term{name, {}, {}});
    }
    if (depth > 0 && gen::coin(rng, 3)) {
        std::vector<std::string> maps;
        for (const auto& [name, m] : sig.maps) {
            if (same_space(m.target(), sort)) maps.push_back(name);
        }
        const std::string& name = maps[gen::uniform(rng, maps.size())];
        return dsl::Term{name, {random_term(rng, sig, env, sig.maps.at(name).source(), depth - 1)}, {}};
    }
    return options[gen::uniform(rng, options.size())];
}

dsl::Formula leaf(dsl::Kind k) {
    dsl::Formula f{k, {}, {}, Rational(0), {}, {}, {}};
    return f;
}

} // namespace

dsl::Formula random_formula(gen::Rng& rng, const dsl::Signature& sig, const dsl::Env& env,
                            std::size_t depth) {
    const SpacePtr& x = sig.spaces.at("X");
    const SpacePtr& y = sig.spaces.at("Y");
    auto sort = [&] { return gen::coin(rng) ? x : y; };
    const std::size_t choice = depth == 0 ? gen::uniform(rng, 5) : gen::uniform(rng, 11);
    switch (choice) {
    case 0: {
        SpacePtr s = sort();
        dsl::Formula f = leaf(dsl::Kind::Distance);
        f.terms = {random_term(rng, sig, env, s, 2), random_term(rng, sig, env, s, 2)};
        return f;
    }
    case 1: {
        dsl::Formula f = leaf(dsl::Kind::Atom);
        f.name = "P";
        f.terms = {random_term(rng, sig, env, x, 2)};
        return f;
    }
    case 2: {
        dsl::Formula f = leaf(dsl::Kind::Atom);
        f.name = "Q";
        f.terms = {random_term(rng, sig, env, y, 2)};
        return f;
    }
    case 3: {
        dsl::Formula f = leaf(dsl::Kind::Atom);
        f.name = "R";
        f.terms = {random_term(rng, sig, env, x, 2), random_term(rng, sig, env, y, 2)};
        return f;
    }
    case 4: {
        dsl::Formula f = leaf(dsl::Kind::Const);
        f.constant = gen::grid_rational(rng, 8, 0, 8);
        return f;
    }
    case 5:
    case 6:
    case 7: {
        static const dsl::Kind kinds[] = {dsl::Kind::Plus, dsl::Kind::Max, dsl::Kind::Min};
        dsl::Formula f = leaf(kinds[choice - 5]);
        f.children = {random_formula(rng, sig, env, depth - 1), random_formula(rng, sig, env, depth - 1)};
        return f;
    }
    default: {
        dsl::Formula f = leaf(gen::coin(rng) ? dsl::Kind::Inf : dsl::Kind::Sup);
        static const char* names[] = {"x", "y", "u", "v"};
        bool over_x = gen::coin(rng);
        f.name = names[gen::uniform(rng, 4)];
        f.space = over_x ? "X" : "Y";
        dsl::Env inner = env;
        inner.insert(inner.begin(), {f.name, over_x ? x : y});
        f.children = {random_formula(rng, sig, inner, depth - 1)};
        return f;
    }
    }
}

namespace {

/// Coordinates of a context point, innermost variable first.
std::vector<std::size_t> coordinates(const dsl::Env& env, std::size_t point) {
    std::vector<std::size_t> out(env.size());
    for (std::size_t i = env.size(); i-- > 0;) {
        std::size_t stride = 1;
        for (std::size_t j = i + 1; j < env.size(); ++j) stride *= env[j].second->size();
        out[i] = (point / stride) % env[i].second->size();
    }
    return out;
}

std::size_t context_index(const dsl::Env& env, const std::vector<std::size_t>& coords) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < env.size(); ++i) idx = idx * env[i].second->size() + coords[i];
    return idx;
}

std::size_t term_value(const dsl::Term& t, const dsl::Signature& sig, const dsl::Env& env,
                       const std::vector<std::size_t>& coords) {
    if (t.is_application()) return sig.maps.at(t.name)(term_value(t.args[0], sig, env, coords));
    for (std::size_t i = 0; i < env.size(); ++i) {
        if (env[i].first == t.name) return coords[i];
    }
    return sig.constants.at(t.name).second;
}

void quantifier_agreement(Report& rep, const dsl::Formula& f, const dsl::Signature& sig,
                          const dsl::Env& env, const std::string& text) {
    for (const auto& c : f.children) {
        if (f.kind == dsl::Kind::Inf || f.kind == dsl::Kind::Sup) {
            dsl::Env inner = env;
            inner.insert(inner.begin(), {f.name, sig.spaces.at(f.space)});
            quantifier_agreement(rep, c, sig, inner, text);
        } else {
            quantifier_agreement(rep, c, sig, env, text);
        }
    }
    if (f.kind != dsl::Kind::Inf && f.kind != dsl::Kind::Sup) return;

    const SpacePtr& s = sig.spaces.at(f.space);
    dsl::Env inner = env;
    inner.insert(inner.begin(), {f.name, s});
    Predicate body = dsl::evaluate(f.children[0], sig, inner);
    // With no outer variables the body lives on S itself; view it on S x 1.
    SpacePtr outer = dsl::context_space(env);
    SpacePtr sx = product(s, outer);
    Predicate on_product(sx, std::vector<TruthValue>(body.values().begin(), body.values().end()),
                         body.modulus());
    MetricMap pi = projection_map(sx, 1);
    Predicate adj = f.kind == dsl::Kind::Inf ? exists_along(pi, on_product) : forall_proj(pi, on_product);
    Predicate direct = dsl::evaluate(f, sig, env);
    rep.check(f.kind == dsl::Kind::Inf ? "inf agrees with exists" : "sup agrees with forall",
              std::equal(adj.values().begin(), adj.values().end(), direct.values().begin(),
                         direct.values().end()) &&
                  adj.modulus() == direct.modulus(),
              [&] {
                  return "in \"" + text + "\" at \"" + dsl::to_string(f) + "\": adjoint " +
                         join_values(adj.values()) + ", direct " + join_values(direct.values());
              });
}

} // namespace

Report dsl_suite(const Params& p) {
    Report rep("dsl");
    gen::Rng rng(p.seed);
    const std::size_t formulas = or_default(p.count, 200);
    const std::size_t size = or_default(p.size, 3);

    for (std::size_t i = 0; i < formulas; ++i) {
        dsl::Signature sig = random_signature(rng, size);
        dsl::Env env = random_env(rng, sig);
        dsl::Formula f = random_formula(rng, sig, env, 1 + gen::uniform(rng, 4));
        const std::string text = dsl::to_string(f);
        auto where = [&] { return "\"" + text + "\""; };

        rep.check("printed formula parses back", dsl::parse(text) == f, where);

        Predicate val = dsl::evaluate(f, sig, env);
        Modulus inferred = dsl::infer_modulus(f, sig, env);
        rep.check("inferred modulus is sound", check_modulus(*val.space(), val.values(), inferred), [&] {
            return where() + " with modulus " + to_string(inferred) + ", values " + join_values(val.values());
        });
        rep.check("declared modulus is the inferred one", val.modulus() == inferred,
                  [&] { return where() + ": " + to_string(val.modulus()); });

        quantifier_agreement(rep, f, sig, env, text);

        // Substitution: evaluating f[t/v] is pulling f back along the map that
        // overwrites v's coordinate with t.
        if (!env.empty()) {
            const std::size_t vi = gen::uniform(rng, env.size());
            const auto& [var, sort] = env[vi];
            dsl::Term t = random_term(rng, sig, env, sort, 2);
            std::optional<dsl::Formula> sub;
            try {
                sub = dsl::substitute(f, var, t);
            } catch (const PreconditionError&) {
            }
            if (sub) {
                SpacePtr ctx = val.space();
                std::vector<std::size_t> assign(ctx->size());
                for (std::size_t e = 0; e < ctx->size(); ++e) {
                    auto co = coordinates(env, e);
                    co[vi] = term_value(t, sig, env, co);
                    assign[e] = context_index(env, co);
                }
                Predicate lhs = dsl::evaluate(*sub, sig, env);
                Predicate rhs = predicate_pullback(MetricMap(ctx, ctx, assign), val);
                rep.check("substitution is pullback",
                          std::equal(lhs.values().begin(), lhs.values().end(), rhs.values().begin(),
                                     rhs.values().end()),
                          [&] { return where() + " with " + var + " := " + dsl::to_string(t); });
            }
        }

        // Re-association of + gives identical results.
        dsl::Formula a = random_formula(rng, sig, env, 1);
        dsl::Formula b = random_formula(rng, sig, env, 1);
        dsl::Formula left = leaf(dsl::Kind::Plus), right = leaf(dsl::Kind::Plus);
        left.children = {leaf(dsl::Kind::Plus), f};
        left.children[0].children = {a, b};
        right.children = {a, leaf(dsl::Kind::Plus)};
        right.children[1].children = {b, f};
        rep.check("plus re-associates", dsl::evaluate(left, sig, env) == dsl::evaluate(right, sig, env),
                  [&] { return dsl::to_string(left) + " vs " + dsl::to_string(right); });
    }
    return rep;
}

// ----------------------------------------------------------------- dispatch

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"frobenius", "beck-chevalley", "classifier", "envelope",
                                                "quantifier", "presheaf",       "metrization", "distance",
                                                "dsl"};
    return names;
}

Report run_suite(std::string_view name, const Params& p) {
    if (name == "frobenius") return frobenius_suite(p);
    if (name == "beck-chevalley") return beck_chevalley_suite(p);
    if (name == "classifier") return classifier_suite(p);
    if (name == "envelope") return envelope_suite(p);
    if (name == "quantifier") return quantifier_suite(p);
    if (name == "presheaf") return presheaf_suite(p);
    if (name == "metrization") return metrization_suite(p);
    if (name == "distance") return distance_suite(p);
    if (name == "dsl") return dsl_suite(p);
    throw PreconditionError("unknown law suite '" + std::string(name) + "'");
}

} // namespace contsem::laws
