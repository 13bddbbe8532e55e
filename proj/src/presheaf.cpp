#include "contsem/presheaf.hpp"

#include "contsem/error.hpp"

#include <algorithm>

namespace contsem {

namespace {

std::string identity_name(const std::string& object) { return "1_" + object; }

Violation violation(std::string axiom, std::vector<std::string> witnesses, std::string message) {
    return Violation{std::move(axiom), std::move(witnesses), std::move(message)};
}

void require_same(const PresheafPtr& a, const PresheafPtr& b, const char* what) {
    if (!same_presheaf(a, b)) throw PreconditionError(std::string(what) + ": presheaf mismatch");
}

std::string point_name(const MetricPresheaf& f, std::size_t a, std::size_t x) {
    return f.category()->object(a) + ":" + f.at(a)->label(x);
}

/// a minus c, floored at 0; an infinite c leaves no constraint.
TruthValue monus(const TruthValue& a, const TruthValue& c) {
    if (c.is_infinite()) return TruthValue(0);
    if (a.is_infinite()) return a;
    Rational d = a.value() - c.value();
    return d < 0 ? TruthValue(0) : TruthValue(d);
}

/// Flattened (object, point) nodes.
struct Nodes {
    std::vector<std::size_t> offset;
    std::size_t total = 0;

    explicit Nodes(const MetricPresheaf& f) {
        for (const SpacePtr& s : f.spaces()) {
            offset.push_back(total);
            total += s->size();
        }
    }
    std::size_t operator()(std::size_t a, std::size_t x) const { return offset[a] + x; }
};

/// Dijkstra over (object, point) nodes. Edges (a,x) -> (a,y) cost d_a(x,y);
/// (a,x) -> (b, F m x) cost 0 for m: b -> a. The minorant pass lowers values
/// along edges, the majorant pass raises them against the edges.
std::vector<std::vector<TruthValue>> relax(const MetricPresheaf& f,
                                           const std::vector<std::vector<TruthValue>>& start,
                                           bool greatest_minorant) {
    const FinCategory& c = *f.category();
    const Quantale& q = f.quantale();
    Nodes nodes(f);
    std::vector<TruthValue> value;
    std::vector<std::pair<std::size_t, std::size_t>> where;
    for (std::size_t a = 0; a < c.object_count(); ++a) {
        if (start[a].size() != f.at(a)->size()) {
            throw PreconditionError("expected one value per point of F(" + c.object(a) + ")");
        }
        for (std::size_t x = 0; x < start[a].size(); ++x) {
            value.push_back(start[a][x]);
            where.emplace_back(a, x);
        }
    }
    // Zero-cost edges out of each node: to every restriction (minorant), or
    // from every restriction (majorant).
    std::vector<std::vector<std::size_t>> zero_edges(nodes.total);
    for (std::size_t m = 0; m < c.morphism_count(); ++m) {
        const Arrow& ar = c.arrow(m);
        for (std::size_t x = 0; x < f.at(ar.target)->size(); ++x) {
            std::size_t from = nodes(ar.target, x);
            std::size_t to = nodes(ar.source, f.restrict(m, x));
            if (greatest_minorant) zero_edges[from].push_back(to);
            else zero_edges[to].push_back(from);
        }
    }

    std::vector<bool> settled(nodes.total, false);
    for (std::size_t round = 0; round < nodes.total; ++round) {
        std::size_t u = nodes.total;
        for (std::size_t v = 0; v < nodes.total; ++v) {
            if (settled[v]) continue;
            if (u == nodes.total || (greatest_minorant ? value[v] < value[u] : value[v] > value[u])) {
                u = v;
            }
        }
        settled[u] = true;
        auto [a, x] = where[u];
        const FiniteMetricSpace& s = *f.at(a);
        for (std::size_t y = 0; y < s.size(); ++y) {
            std::size_t v = nodes(a, y);
            if (settled[v]) continue;
            if (greatest_minorant) {
                TruthValue cand = q.tensor(value[u], s.distance(x, y));
                if (cand < value[v]) value[v] = std::move(cand);
            } else {
                TruthValue cand = monus(value[u], s.distance(x, y));
                if (cand > value[v]) value[v] = std::move(cand);
            }
        }
        for (std::size_t v : zero_edges[u]) {
            if (settled[v]) continue;
            if (greatest_minorant ? value[u] < value[v] : value[u] > value[v]) value[v] = value[u];
        }
    }

    std::vector<std::vector<TruthValue>> out(c.object_count());
    for (std::size_t i = 0; i < nodes.total; ++i) out[where[i].first].push_back(value[i]);
    return out;
}

} // namespace

// ---- categories ------------------------------------------------------------

FinCategory::FinCategory(std::vector<std::string> objects, std::vector<MorphismDecl> morphisms,
                         std::vector<CompositeDecl> composition)
    : objects_(std::move(objects)) {
    for (std::size_t i = 0; i < objects_.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (objects_[i] == objects_[j]) {
                throw PreconditionError("duplicate object '" + objects_[i] + "'");
            }
        }
    }
    auto object_of = [&](const std::string& label, const std::string& m) {
        auto a = object_index(label);
        if (!a) throw PreconditionError("morphism '" + m + "' refers to unknown object '" + label + "'");
        return *a;
    };

    identities_.assign(objects_.size(), 0);
    std::vector<bool> have_identity(objects_.size(), false);
    for (const MorphismDecl& d : morphisms) {
        if (morphism_index(d.id)) throw PreconditionError("duplicate morphism '" + d.id + "'");
        Arrow ar{d.id, object_of(d.source, d.id), object_of(d.target, d.id)};
        for (std::size_t a = 0; a < objects_.size(); ++a) {
            if (d.id != identity_name(objects_[a])) continue;
            if (ar.source != a || ar.target != a) {
                throw PreconditionError("identity '" + d.id + "' must be an endomorphism of '" +
                                        objects_[a] + "'");
            }
            identities_[a] = arrows_.size();
            have_identity[a] = true;
        }
        arrows_.push_back(std::move(ar));
    }
    for (std::size_t a = 0; a < objects_.size(); ++a) {
        if (have_identity[a]) continue;
        std::string id = identity_name(objects_[a]);
        if (morphism_index(id)) throw PreconditionError("'" + id + "' is reserved for an identity");
        identities_[a] = arrows_.size();
        arrows_.push_back(Arrow{id, a, a});
    }

    const std::size_t n = arrows_.size();
    composite_.assign(n * n, std::nullopt);
    auto set = [&](std::size_t g, std::size_t f, std::size_t gf) {
        auto& slot = composite_[g * n + f];
        if (slot && *slot != gf) {
            throw PreconditionError("conflicting composites for '" + arrows_[g].id + "' after '" +
                                    arrows_[f].id + "': '" + arrows_[*slot].id + "' and '" +
                                    arrows_[gf].id + "'");
        }
        slot = gf;
    };
    for (std::size_t m = 0; m < n; ++m) {
        set(identities_[arrows_[m].target], m, m);
        set(m, identities_[arrows_[m].source], m);
    }
    for (const CompositeDecl& e : composition) {
        auto g = morphism_index(e.g);
        auto f = morphism_index(e.f);
        auto gf = morphism_index(e.gf);
        if (!g || !f || !gf) {
            throw PreconditionError("composition entry [" + e.g + ", " + e.f + ", " + e.gf +
                                    "] names an unknown morphism");
        }
        if (arrows_[*f].target != arrows_[*g].source) {
            throw PreconditionError("'" + e.g + "' after '" + e.f + "' is not composable");
        }
        if (arrows_[*gf].source != arrows_[*f].source || arrows_[*gf].target != arrows_[*g].target) {
            throw PreconditionError("composite '" + e.gf + "' of '" + e.g + "' after '" + e.f +
                                    "' has the wrong type");
        }
        set(*g, *f, *gf);
    }

    into_.assign(objects_.size(), {});
    position_.assign(n, 0);
    for (std::size_t m = 0; m < n; ++m) {
        position_[m] = into_[arrows_[m].target].size();
        into_[arrows_[m].target].push_back(m);
    }
}

std::optional<std::size_t> FinCategory::object_index(std::string_view label) const {
    auto it = std::find(objects_.begin(), objects_.end(), label);
    if (it == objects_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - objects_.begin());
}

std::optional<std::size_t> FinCategory::morphism_index(std::string_view id) const {
    for (std::size_t m = 0; m < arrows_.size(); ++m) {
        if (arrows_[m].id == id) return m;
    }
    return std::nullopt;
}

bool FinCategory::is_identity(std::size_t m) const {
    return identities_[arrows_[m].target] == m;
}

std::vector<std::string> FinCategory::arrow_ids() const {
    std::vector<std::string> out;
    for (const Arrow& a : arrows_) out.push_back(a.id);
    return out;
}

std::optional<Violation> validate_category(const FinCategory& c) {
    const std::size_t n = c.morphism_count();
    for (std::size_t g = 0; g < n; ++g) {
        for (std::size_t f = 0; f < n; ++f) {
            if (c.arrow(f).target != c.arrow(g).source) continue;
            if (!c.compose(g, f)) {
                return violation("totality", {c.arrow(g).id, c.arrow(f).id},
                                 "missing composite of '" + c.arrow(g).id + "' after '" +
                                     c.arrow(f).id + "'");
            }
        }
    }
    for (std::size_t h = 0; h < n; ++h) {
        for (std::size_t g = 0; g < n; ++g) {
            if (c.arrow(g).target != c.arrow(h).source) continue;
            for (std::size_t f = 0; f < n; ++f) {
                if (c.arrow(f).target != c.arrow(g).source) continue;
                std::size_t left = *c.compose(h, *c.compose(g, f));
                std::size_t right = *c.compose(*c.compose(h, g), f);
                if (left != right) {
                    return violation("associativity", {c.arrow(h).id, c.arrow(g).id, c.arrow(f).id},
                                     "composition is not associative at (" + c.arrow(h).id + ", " +
                                         c.arrow(g).id + ", " + c.arrow(f).id + ")");
                }
            }
        }
    }
    return std::nullopt;
}

CategoryPtr make_category(std::vector<std::string> objects, std::vector<MorphismDecl> morphisms,
                          std::vector<CompositeDecl> composition) {
    auto c = std::make_shared<const FinCategory>(std::move(objects), std::move(morphisms),
                                                 std::move(composition));
    if (auto v = validate_category(*c)) throw PreconditionError(v->message);
    return c;
}

// ---- presheaves ------------------------------------------------------------

MetricPresheaf::MetricPresheaf(CategoryPtr category, std::vector<SpacePtr> spaces,
                               std::vector<std::vector<std::size_t>> restrictions,
                               std::vector<std::shared_ptr<const MetricPresheaf>> factors)
    : category_(std::move(category)), spaces_(std::move(spaces)),
      restrictions_(std::move(restrictions)), factors_(std::move(factors)) {
    const FinCategory& c = *category_;
    if (c.object_count() == 0) throw PreconditionError("category has no objects");
    if (spaces_.size() != c.object_count()) {
        throw PreconditionError("expected one space per object");
    }
    restrictions_.resize(c.morphism_count());
    for (std::size_t m = 0; m < c.morphism_count(); ++m) {
        const Arrow& ar = c.arrow(m);
        auto& r = restrictions_[m];
        if (r.empty() && c.is_identity(m)) {
            r.resize(spaces_[ar.target]->size());
            for (std::size_t x = 0; x < r.size(); ++x) r[x] = x;
        }
        if (r.size() != spaces_[ar.target]->size()) {
            throw PreconditionError("restriction along '" + ar.id + "' must be defined on every point of F(" +
                                    c.object(ar.target) + ")");
        }
        for (std::size_t y : r) {
            if (y >= spaces_[ar.source]->size()) {
                throw PreconditionError("restriction along '" + ar.id + "' leaves F(" +
                                        c.object(ar.source) + ")");
            }
        }
    }
}

bool operator==(const MetricPresheaf& a, const MetricPresheaf& b) {
    if (!(*a.category_ == *b.category_) || a.restrictions_ != b.restrictions_) return false;
    for (std::size_t i = 0; i < a.spaces_.size(); ++i) {
        if (!same_space(a.spaces_[i], b.spaces_[i])) return false;
    }
    return true;
}

bool same_presheaf(const PresheafPtr& a, const PresheafPtr& b) { return a == b || *a == *b; }

std::optional<Violation> validate_presheaf(const MetricPresheaf& f) {
    const FinCategory& c = *f.category();
    for (std::size_t a = 0; a < c.object_count(); ++a) {
        if (auto v = validate_space(*f.at(a))) {
            v->message = "F(" + c.object(a) + "): " + v->message;
            return v;
        }
        if (!(f.at(a)->quantale() == f.quantale())) {
            return violation("range", {c.object(a)}, "components use different quantales");
        }
    }
    for (std::size_t m = 0; m < c.morphism_count(); ++m) {
        const Arrow& ar = c.arrow(m);
        const FiniteMetricSpace& fa = *f.at(ar.target);
        const FiniteMetricSpace& fb = *f.at(ar.source);
        if (c.is_identity(m)) {
            for (std::size_t x = 0; x < fa.size(); ++x) {
                if (f.restrict(m, x) != x) {
                    return violation("functoriality", {ar.id, fa.label(x)},
                                     "restriction along identity '" + ar.id + "' moves '" +
                                         fa.label(x) + "'");
                }
            }
        }
        for (std::size_t x = 0; x < fa.size(); ++x) {
            for (std::size_t y = 0; y < fa.size(); ++y) {
                const TruthValue& before = fa.distance(x, y);
                const TruthValue& after = fb.distance(f.restrict(m, x), f.restrict(m, y));
                if (after > before) {
                    return violation("lipschitz", {ar.id, fa.label(x), fa.label(y)},
                                     "restriction along '" + ar.id + "' stretches d(" + fa.label(x) +
                                         ", " + fa.label(y) + ") = " + to_string(before) +
                                         " to " + to_string(after));
                }
            }
        }
    }
    for (std::size_t g = 0; g < c.morphism_count(); ++g) {
        for (std::size_t h = 0; h < c.morphism_count(); ++h) {
            auto gh = c.compose(g, h);
            if (!gh) continue;
            const FiniteMetricSpace& fa = *f.at(c.arrow(g).target);
            for (std::size_t x = 0; x < fa.size(); ++x) {
                if (f.restrict(*gh, x) != f.restrict(h, f.restrict(g, x))) {
                    return violation("functoriality", {c.arrow(g).id, c.arrow(h).id, fa.label(x)},
                                     "restriction along '" + c.arrow(*gh).id + "' differs from '" +
                                         c.arrow(g).id + "' then '" + c.arrow(h).id + "' at '" +
                                         fa.label(x) + "'");
                }
            }
        }
    }
    return std::nullopt;
}

PresheafPtr make_presheaf(CategoryPtr category, std::vector<SpacePtr> spaces,
                          std::vector<std::vector<std::size_t>> restrictions) {
    auto f = std::make_shared<const MetricPresheaf>(std::move(category), std::move(spaces),
                                                    std::move(restrictions));
    if (auto v = validate_presheaf(*f)) throw PreconditionError(v->message);
    return f;
}

PresheafPtr terminal_presheaf(const CategoryPtr& c, Quantale q) {
    SpacePtr one = terminal_space(q);
    std::vector<std::vector<std::size_t>> r(c->morphism_count(), std::vector<std::size_t>{0});
    return std::make_shared<const MetricPresheaf>(c, std::vector<SpacePtr>(c->object_count(), one),
                                                  std::move(r));
}

PresheafPtr presheaf_product(const PresheafPtr& f, const PresheafPtr& g) {
    if (!(*f->category() == *g->category())) {
        throw PreconditionError("presheaf product: category mismatch");
    }
    const FinCategory& c = *f->category();
    std::vector<SpacePtr> spaces;
    for (std::size_t a = 0; a < c.object_count(); ++a) spaces.push_back(product(f->at(a), g->at(a)));
    std::vector<std::vector<std::size_t>> r(c.morphism_count());
    for (std::size_t m = 0; m < c.morphism_count(); ++m) {
        const Arrow& ar = c.arrow(m);
        std::size_t ny_a = g->at(ar.target)->size();
        std::size_t ny_b = g->at(ar.source)->size();
        for (std::size_t p = 0; p < spaces[ar.target]->size(); ++p) {
            r[m].push_back(f->restrict(m, p / ny_a) * ny_b + g->restrict(m, p % ny_a));
        }
    }
    return std::make_shared<const MetricPresheaf>(f->category(), std::move(spaces), std::move(r),
                                                  std::vector<PresheafPtr>{f, g});
}

// ---- subobjects --------------------------------------------------------------

bool is_presheaf_sub(const MetricPresheaf& f, const std::vector<std::vector<bool>>& members) {
    const FinCategory& c = *f.category();
    if (members.size() != c.object_count()) return false;
    for (std::size_t a = 0; a < c.object_count(); ++a) {
        if (members[a].size() != f.at(a)->size()) return false;
    }
    for (std::size_t m = 0; m < c.morphism_count(); ++m) {
        const Arrow& ar = c.arrow(m);
        for (std::size_t x = 0; x < members[ar.target].size(); ++x) {
            if (members[ar.target][x] && !members[ar.source][f.restrict(m, x)]) return false;
        }
    }
    return true;
}

PresheafSub::PresheafSub(PresheafPtr presheaf, std::vector<std::vector<bool>> members)
    : presheaf_(std::move(presheaf)), members_(std::move(members)) {
    if (!is_presheaf_sub(*presheaf_, members_)) {
        throw PreconditionError("member sets are not closed under restriction");
    }
}

PresheafSub PresheafSub::full(const PresheafPtr& f) {
    std::vector<std::vector<bool>> m;
    for (const SpacePtr& s : f->spaces()) m.emplace_back(s->size(), true);
    return PresheafSub(f, std::move(m));
}

PresheafSub PresheafSub::empty(const PresheafPtr& f) {
    std::vector<std::vector<bool>> m;
    for (const SpacePtr& s : f->spaces()) m.emplace_back(s->size(), false);
    return PresheafSub(f, std::move(m));
}

bool leq(const PresheafSub& a, const PresheafSub& b) {
    require_same(a.presheaf(), b.presheaf(), "presheaf sub order");
    for (std::size_t o = 0; o < a.members().size(); ++o) {
        for (std::size_t x = 0; x < a.members()[o].size(); ++x) {
            if (a.contains(o, x) && !b.contains(o, x)) return false;
        }
    }
    return true;
}

PresheafSub presheaf_sub_lattice(LatticeOp op, const PresheafPtr& f,
                                 std::span<const PresheafSub> items) {
    std::vector<std::vector<bool>> acc;
    for (const SpacePtr& s : f->spaces()) acc.emplace_back(s->size(), op == LatticeOp::Meet);
    for (const PresheafSub& s : items) {
        require_same(f, s.presheaf(), "presheaf sub lattice");
        for (std::size_t o = 0; o < acc.size(); ++o) {
            for (std::size_t x = 0; x < acc[o].size(); ++x) {
                acc[o][x] = op == LatticeOp::Meet ? (acc[o][x] && s.contains(o, x))
                                                  : (acc[o][x] || s.contains(o, x));
            }
        }
    }
    return PresheafSub(f, std::move(acc));
}

// ---- natural transformations ---------------------------------------------

std::optional<Violation> validate_natural(const NaturalTransformation& phi) {
    const MetricPresheaf& f = *phi.source;
    const MetricPresheaf& g = *phi.target;
    const FinCategory& c = *f.category();
    if (!(c == *g.category())) return violation("shape", {}, "category mismatch");
    if (phi.components.size() != c.object_count()) {
        return violation("shape", {}, "expected one component per object");
    }
    for (std::size_t a = 0; a < c.object_count(); ++a) {
        const auto& comp = phi.components[a];
        if (comp.size() != f.at(a)->size()) {
            return violation("shape", {c.object(a)},
                             "component at '" + c.object(a) + "' must be defined on every point");
        }
        for (std::size_t y : comp) {
            if (y >= g.at(a)->size()) {
                return violation("shape", {c.object(a)},
                                 "component at '" + c.object(a) + "' leaves the target");
            }
        }
        for (std::size_t x = 0; x < comp.size(); ++x) {
            for (std::size_t y = 0; y < comp.size(); ++y) {
                if (g.at(a)->distance(comp[x], comp[y]) > f.at(a)->distance(x, y)) {
                    return violation("lipschitz", {c.object(a), f.at(a)->label(x), f.at(a)->label(y)},
                                     "component at '" + c.object(a) + "' stretches d(" +
                                         f.at(a)->label(x) + ", " + f.at(a)->label(y) + ")");
                }
            }
        }
    }
    for (std::size_t m = 0; m < c.morphism_count(); ++m) {
        const Arrow& ar = c.arrow(m);
        for (std::size_t x = 0; x < f.at(ar.target)->size(); ++x) {
            if (phi(ar.source, f.restrict(m, x)) != g.restrict(m, phi(ar.target, x))) {
                return violation("naturality", {ar.id, f.at(ar.target)->label(x)},
                                 "naturality square for '" + ar.id + "' fails at '" +
                                     f.at(ar.target)->label(x) + "'");
            }
        }
    }
    return std::nullopt;
}

bool is_regular_mono_presheaf(const NaturalTransformation& phi) {
    if (validate_natural(phi)) return false;
    for (std::size_t a = 0; a < phi.components.size(); ++a) {
        const auto& comp = phi.components[a];
        for (std::size_t x = 0; x < comp.size(); ++x) {
            for (std::size_t y = 0; y < comp.size(); ++y) {
                if (x != y && comp[x] == comp[y]) return false;
                if (phi.target->at(a)->distance(comp[x], comp[y]) != phi.source->at(a)->distance(x, y)) {
                    return false;
                }
            }
        }
    }
    return true;
}

NaturalTransformation identity_natural(const PresheafPtr& f) {
    NaturalTransformation id{f, f, {}};
    for (const SpacePtr& s : f->spaces()) {
        std::vector<std::size_t> comp(s->size());
        for (std::size_t x = 0; x < comp.size(); ++x) comp[x] = x;
        id.components.push_back(std::move(comp));
    }
    return id;
}

NaturalTransformation presheaf_projection(const PresheafPtr& p, std::size_t factor) {
    if (p->factors().size() != 2 || factor > 1) {
        throw PreconditionError("not a coordinate projection of a presheaf product");
    }
    const PresheafPtr& target = p->factors()[factor];
    const PresheafPtr& other = p->factors()[1 - factor];
    NaturalTransformation pi{p, target, {}};
    for (std::size_t a = 0; a < p->spaces().size(); ++a) {
        std::size_t ny = factor == 0 ? other->at(a)->size() : target->at(a)->size();
        std::vector<std::size_t> comp(p->at(a)->size());
        for (std::size_t i = 0; i < comp.size(); ++i) comp[i] = factor == 0 ? i / ny : i % ny;
        pi.components.push_back(std::move(comp));
    }
    return pi;
}

PresheafSub presheaf_pullback_sub(const NaturalTransformation& phi, const PresheafSub& b) {
    require_same(phi.target, b.presheaf(), "presheaf pullback");
    std::vector<std::vector<bool>> m;
    for (std::size_t a = 0; a < phi.components.size(); ++a) {
        std::vector<bool> row;
        for (std::size_t y : phi.components[a]) row.push_back(b.contains(a, y));
        m.push_back(std::move(row));
    }
    return PresheafSub(phi.source, std::move(m));
}

PresheafSub presheaf_rimage(const NaturalTransformation& phi) {
    if (auto v = validate_natural(phi)) throw PreconditionError(v->message);
    std::vector<std::vector<bool>> m;
    for (std::size_t a = 0; a < phi.components.size(); ++a) {
        std::vector<bool> row(phi.target->at(a)->size(), false);
        for (std::size_t y : phi.components[a]) row[y] = true;
        m.push_back(std::move(row));
    }
    return PresheafSub(phi.target, std::move(m));
}

PresheafSub presheaf_distance(const PresheafPtr& ff, const TruthValue& r) {
    if (ff->factors().size() != 2 || !same_presheaf(ff->factors()[0], ff->factors()[1])) {
        throw PreconditionError("presheaf distance needs a product F x F");
    }
    const PresheafPtr& f = ff->factors()[0];
    std::vector<std::vector<bool>> m;
    for (std::size_t a = 0; a < ff->spaces().size(); ++a) {
        std::size_t n = f->at(a)->size();
        std::vector<bool> row(n * n);
        for (std::size_t p = 0; p < row.size(); ++p) row[p] = f->at(a)->distance(p / n, p % n) <= r;
        m.push_back(std::move(row));
    }
    return PresheafSub(ff, std::move(m));
}

// ---- predicates --------------------------------------------------------------

std::optional<Violation> presheaf_predicate_violation(
    const MetricPresheaf& f, const std::vector<std::vector<TruthValue>>& values) {
    const FinCategory& c = *f.category();
    const Quantale& q = f.quantale();
    if (values.size() != c.object_count()) {
        return violation("shape", {}, "expected values at every object");
    }
    for (std::size_t a = 0; a < c.object_count(); ++a) {
        const FiniteMetricSpace& s = *f.at(a);
        if (values[a].size() != s.size()) {
            return violation("shape", {c.object(a)},
                             "expected one value per point of F(" + c.object(a) + ")");
        }
        for (std::size_t x = 0; x < s.size(); ++x) {
            if (!q.contains(values[a][x])) {
                return violation("range", {point_name(f, a, x)},
                                 "value at " + point_name(f, a, x) + " lies outside the carrier");
            }
        }
        for (std::size_t x = 0; x < s.size(); ++x) {
            for (std::size_t y = 0; y < s.size(); ++y) {
                if (values[a][y] > q.tensor(values[a][x], s.distance(x, y))) {
                    return violation("lipschitz", {point_name(f, a, x), point_name(f, a, y)},
                                     "values at " + point_name(f, a, x) + " and " +
                                         point_name(f, a, y) + " differ by more than their distance " +
                                         to_string(s.distance(x, y)));
                }
            }
        }
    }
    for (std::size_t m = 0; m < c.morphism_count(); ++m) {
        const Arrow& ar = c.arrow(m);
        for (std::size_t x = 0; x < f.at(ar.target)->size(); ++x) {
            std::size_t y = f.restrict(m, x);
            if (values[ar.source][y] > values[ar.target][x]) {
                return violation("monotone", {ar.id, point_name(f, ar.target, x)},
                                 "value rises from " + to_string(values[ar.target][x]) + " at " +
                                     point_name(f, ar.target, x) + " to " +
                                     to_string(values[ar.source][y]) + " along '" + ar.id + "'");
            }
        }
    }
    return std::nullopt;
}

bool is_presheaf_predicate(const MetricPresheaf& f,
                           const std::vector<std::vector<TruthValue>>& values) {
    return !presheaf_predicate_violation(f, values);
}

PresheafPredicate::PresheafPredicate(PresheafPtr presheaf, std::vector<std::vector<TruthValue>> values)
    : presheaf_(std::move(presheaf)), values_(std::move(values)) {
    if (auto v = presheaf_predicate_violation(*presheaf_, values_)) {
        throw PreconditionError("not a presheaf predicate: " + v->message);
    }
}

bool leq(const PresheafPredicate& a, const PresheafPredicate& b) {
    require_same(a.presheaf(), b.presheaf(), "presheaf predicate order");
    for (std::size_t o = 0; o < a.values().size(); ++o) {
        for (std::size_t x = 0; x < a.values()[o].size(); ++x) {
            if (b.value(o, x) > a.value(o, x)) return false;
        }
    }
    return true;
}

PresheafPredicate presheaf_envelope(const PresheafPtr& f,
                                    const std::vector<std::vector<TruthValue>>& thresholds) {
    return PresheafPredicate(f, relax(*f, thresholds, true));
}

PresheafPredicate presheaf_upper_envelope(const PresheafPtr& f,
                                          const std::vector<std::vector<TruthValue>>& floor) {
    return PresheafPredicate(f, relax(*f, floor, false));
}

PresheafPredicate presheaf_predicate_pullback(const NaturalTransformation& phi,
                                              const PresheafPredicate& p) {
    require_same(phi.target, p.presheaf(), "presheaf predicate pullback");
    std::vector<std::vector<TruthValue>> v;
    for (std::size_t a = 0; a < phi.components.size(); ++a) {
        std::vector<TruthValue> row;
        for (std::size_t y : phi.components[a]) row.push_back(p.value(a, y));
        v.push_back(std::move(row));
    }
    return PresheafPredicate(phi.source, std::move(v));
}

PresheafPredicate presheaf_exists(const NaturalTransformation& phi, const PresheafPredicate& r) {
    require_same(phi.source, r.presheaf(), "presheaf exists");
    if (auto v = validate_natural(phi)) throw PreconditionError(v->message);
    const Quantale& q = phi.target->quantale();
    std::vector<std::vector<TruthValue>> raw;
    for (std::size_t a = 0; a < phi.components.size(); ++a) {
        std::vector<TruthValue> row(phi.target->at(a)->size(), q.top());
        for (std::size_t x = 0; x < phi.components[a].size(); ++x) {
            row[phi(a, x)] = std::min(row[phi(a, x)], r.value(a, x));
        }
        raw.push_back(std::move(row));
    }
    return presheaf_envelope(phi.target, raw);
}

PresheafPredicate presheaf_forall(const NaturalTransformation& pi, const PresheafPredicate& r) {
    require_same(pi.source, r.presheaf(), "presheaf forall");
    const auto& factors = pi.source->factors();
    if (factors.size() != 2 || !(same_presheaf(factors[0], pi.target) ||
                                 same_presheaf(factors[1], pi.target))) {
        throw PreconditionError("presheaf forall needs a product projection");
    }
    for (std::size_t a = 0; a < pi.components.size(); ++a) {
        if (pi.source->at(a)->size() == 0 && pi.target->at(a)->size() != 0) {
            throw PreconditionError("forall requires inhabited factor");
        }
    }
    std::vector<std::vector<TruthValue>> raw;
    for (std::size_t a = 0; a < pi.components.size(); ++a) {
        std::vector<TruthValue> row(pi.target->at(a)->size(), TruthValue(0));
        for (std::size_t x = 0; x < pi.components[a].size(); ++x) {
            row[pi(a, x)] = std::max(row[pi(a, x)], r.value(a, x));
        }
        raw.push_back(std::move(row));
    }
    return presheaf_upper_envelope(pi.target, raw);
}

// ---- the classifier ------------------------------------------------------------

void validate_omega(const OmegaElement& s) {
    const FinCategory& c = *s.category;
    const auto& into = c.morphisms_into(s.object);
    if (s.theta.size() != into.size()) {
        throw PreconditionError("truth value on '" + c.object(s.object) +
                                "' needs one threshold per morphism into it");
    }
    for (std::size_t f : into) {
        for (std::size_t h : c.morphisms_into(c.arrow(f).source)) {
            std::size_t fh = *c.compose(f, h);
            if (s.at(fh) > s.at(f)) {
                throw PreconditionError("threshold of '" + c.arrow(fh).id + "' exceeds that of '" +
                                        c.arrow(f).id + "'; sieves must shrink as r decreases");
            }
        }
    }
}

TruthValue omega_nu(const OmegaElement& s) { return s.at(s.category->identity(s.object)); }

OmegaElement omega_restrict(std::size_t f, const OmegaElement& s) {
    const FinCategory& c = *s.category;
    if (c.arrow(f).target != s.object) {
        throw PreconditionError("cannot restrict along '" + c.arrow(f).id + "': object mismatch");
    }
    std::size_t b = c.arrow(f).source;
    OmegaElement out{s.category, b, {}};
    for (std::size_t h : c.morphisms_into(b)) out.theta.push_back(s.at(*c.compose(f, h)));
    return out;
}

TruthValue omega_distance(const OmegaElement& s1, const OmegaElement& s2, const Quantale& q) {
    if (s1.object != s2.object) throw PreconditionError("truth values live over different objects");
    TruthValue d(0);
    for (std::size_t i = 0; i < s1.theta.size(); ++i) d = std::max(d, q.distance(s1.theta[i], s2.theta[i]));
    return d;
}

Classification classify_presheaf(const PresheafPredicate& r) {
    const MetricPresheaf& f = *r.presheaf();
    const CategoryPtr& c = f.category();
    Classification phi(c->object_count());
    for (std::size_t a = 0; a < c->object_count(); ++a) {
        for (std::size_t x = 0; x < f.at(a)->size(); ++x) {
            OmegaElement s{c, a, {}};
            for (std::size_t m : c->morphisms_into(a)) {
                s.theta.push_back(r.value(c->arrow(m).source, f.restrict(m, x)));
            }
            phi[a].push_back(std::move(s));
        }
    }
    return phi;
}

std::optional<Violation> validate_classification(const MetricPresheaf& f, const Classification& phi) {
    const FinCategory& c = *f.category();
    if (phi.size() != c.object_count()) return violation("shape", {}, "expected one component per object");
    for (std::size_t a = 0; a < c.object_count(); ++a) {
        const FiniteMetricSpace& s = *f.at(a);
        if (phi[a].size() != s.size()) {
            return violation("shape", {c.object(a)},
                             "component at '" + c.object(a) + "' must cover every point");
        }
        for (std::size_t x = 0; x < s.size(); ++x) {
            if (phi[a][x].object != a) {
                return violation("shape", {point_name(f, a, x)},
                                 "truth value at " + point_name(f, a, x) + " sits over the wrong object");
            }
            try {
                validate_omega(phi[a][x]);
            } catch (const PreconditionError& e) {
                return violation("sieve", {point_name(f, a, x)}, e.what());
            }
        }
        for (std::size_t x = 0; x < s.size(); ++x) {
            for (std::size_t y = 0; y < s.size(); ++y) {
                if (omega_distance(phi[a][x], phi[a][y], f.quantale()) > s.distance(x, y)) {
                    return violation("lipschitz", {point_name(f, a, x), point_name(f, a, y)},
                                     "component at '" + c.object(a) + "' stretches d(" +
                                         s.label(x) + ", " + s.label(y) + ")");
                }
            }
        }
    }
    for (std::size_t m = 0; m < c.morphism_count(); ++m) {
        const Arrow& ar = c.arrow(m);
        for (std::size_t x = 0; x < f.at(ar.target)->size(); ++x) {
            if (!(omega_restrict(m, phi[ar.target][x]) == phi[ar.source][f.restrict(m, x)])) {
                return violation("naturality", {ar.id, point_name(f, ar.target, x)},
                                 "naturality square for '" + ar.id + "' fails at " +
                                     point_name(f, ar.target, x));
            }
        }
    }
    return std::nullopt;
}

PresheafPredicate pullback_truth(const PresheafPtr& f, const Classification& phi) {
    if (auto v = validate_classification(*f, phi)) throw PreconditionError(v->message);
    std::vector<std::vector<TruthValue>> values;
    for (const auto& row : phi) {
        std::vector<TruthValue> out;
        for (const OmegaElement& s : row) out.push_back(omega_nu(s));
        values.push_back(std::move(out));
    }
    return PresheafPredicate(f, std::move(values));
}

} // namespace contsem
