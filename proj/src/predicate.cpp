#include "contsem/predicate.hpp"

#include "contsem/error.hpp"

#include <algorithm>

namespace contsem {

namespace {

void require_same(const SpacePtr& a, const SpacePtr& b, const char* what) {
    if (!same_space(a, b)) {
        throw PreconditionError(std::string(what) + ": space mismatch between '" + a->id() +
                                "' and '" + b->id() + "'");
    }
}

void require_carrier(const FiniteMetricSpace& space, std::span<const TruthValue> values) {
    if (values.size() != space.size()) {
        throw PreconditionError("expected one value per point of '" + space.id() + "'");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!space.quantale().contains(values[i])) {
            throw PreconditionError("value " + to_string(values[i]) + " at '" + space.label(i) +
                                    "' lies outside the carrier");
        }
    }
}

} // namespace

IndexedFamily::IndexedFamily(SpacePtr space, std::vector<TruthValue> thresholds)
    : IndexedFamily(space, std::move(thresholds), std::vector<bool>(space->size(), true)) {}

IndexedFamily::IndexedFamily(SpacePtr space, std::vector<TruthValue> thresholds,
                             std::vector<bool> attained)
    : space_(std::move(space)), thresholds_(std::move(thresholds)), attained_(std::move(attained)) {
    require_carrier(*space_, thresholds_);
    if (attained_.size() != thresholds_.size()) {
        throw PreconditionError("expected one attained flag per point of '" + space_->id() + "'");
    }
}

bool IndexedFamily::meet_closed() const {
    return std::all_of(attained_.begin(), attained_.end(), [](bool b) { return b; });
}

Subobject IndexedFamily::level(const TruthValue& r) const {
    std::vector<bool> members(thresholds_.size());
    for (std::size_t x = 0; x < members.size(); ++x) {
        members[x] = thresholds_[x] < r || (thresholds_[x] == r && attained_[x]);
    }
    return Subobject(space_, std::move(members));
}

IndexedFamily IndexedFamily::closure() const { return IndexedFamily(space_, thresholds_); }

Predicate::Predicate(SpacePtr space, std::vector<TruthValue> values, Modulus modulus)
    : space_(std::move(space)), values_(std::move(values)), modulus_(std::move(modulus)) {
    require_carrier(*space_, values_);
    if (modulus_.quantale() != space_->quantale()) {
        throw PreconditionError("predicate modulus is over a different quantale than '" +
                                space_->id() + "'");
    }
    if (auto w = continuity_witness(*space_, values_, modulus_)) {
        auto [x, y] = *w;
        throw PreconditionError(
            "not a " + to_string(modulus_) + "-predicate on '" + space_->id() + "': value " +
            to_string(values_[y]) + " at '" + space_->label(y) + "' exceeds " +
            to_string(values_[x]) + " at '" + space_->label(x) + "' by more than eps(" +
            to_string(space_->distance(x, y)) + ") = " + to_string(modulus_(space_->distance(x, y))));
    }
}

std::optional<std::pair<std::size_t, std::size_t>>
continuity_witness(const FiniteMetricSpace& space, std::span<const TruthValue> values,
                   const Modulus& eps) {
    const Quantale& q = space.quantale();
    const std::size_t n = space.size();
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            if (x == y) continue;
            if (values[y] > q.tensor(values[x], eps(space.distance(x, y)))) return std::pair{x, y};
        }
    }
    return std::nullopt;
}

bool leq(const IndexedFamily& r, const IndexedFamily& s) {
    require_same(r.space(), s.space(), "family order");
    for (std::size_t x = 0; x < r.thresholds().size(); ++x) {
        const TruthValue& tr = r.threshold(x);
        const TruthValue& ts = s.threshold(x);
        // x never enters R.
        if (tr == r.space()->quantale().top() && !r.attained(x)) continue;
        if (ts < tr) continue;
        if (ts == tr && (s.attained(x) || !r.attained(x))) continue;
        return false;
    }
    return true;
}

bool leq(const Predicate& a, const Predicate& b) {
    require_same(a.space(), b.space(), "predicate order");
    for (std::size_t x = 0; x < a.values().size(); ++x) {
        if (b.value(x) > a.value(x)) return false;
    }
    return true;
}

bool is_epsilon_predicate(const IndexedFamily& r, const Modulus& eps) {
    if (!r.meet_closed()) return false;
    return !continuity_witness(*r.space(), r.thresholds(), eps);
}

Predicate to_predicate(const IndexedFamily& r, const Modulus& eps) {
    if (!r.meet_closed()) {
        for (std::size_t x = 0; x < r.attained().size(); ++x) {
            if (!r.attained(x)) {
                throw PreconditionError("family is not closed under infima: threshold " +
                                        to_string(r.threshold(x)) + " at '" +
                                        r.space()->label(x) + "' is not attained");
            }
        }
    }
    return Predicate(r.space(),
                     std::vector<TruthValue>(r.thresholds().begin(), r.thresholds().end()), eps);
}

IndexedFamily to_family(const Predicate& p) {
    return IndexedFamily(p.space(), std::vector<TruthValue>(p.values().begin(), p.values().end()));
}

Predicate envelope(const IndexedFamily& r, const Modulus& eps) {
    const FiniteMetricSpace& x = *r.space();
    const Quantale& q = x.quantale();
    if (eps.quantale() != q) {
        throw PreconditionError("envelope modulus is over a different quantale");
    }
    const std::size_t n = x.size();

    std::vector<TruthValue> cost(n * n);
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = 0; v < n; ++v) cost[u * n + v] = eps(x.distance(u, v));
    }

    // Dense Dijkstra: the graph is complete, so a heap buys nothing.
    std::vector<TruthValue> value(r.thresholds().begin(), r.thresholds().end());
    std::vector<bool> settled(n, false);
    for (std::size_t round = 0; round < n; ++round) {
        std::size_t u = n;
        for (std::size_t v = 0; v < n; ++v) {
            if (!settled[v] && (u == n || value[v] < value[u])) u = v;
        }
        settled[u] = true;
        for (std::size_t v = 0; v < n; ++v) {
            if (settled[v]) continue;
            TruthValue candidate = q.tensor(value[u], cost[u * n + v]);
            if (candidate < value[v]) value[v] = std::move(candidate);
        }
    }
    return Predicate(r.space(), std::move(value), eps);
}

Predicate restrict_envelope(const Predicate& p, const Modulus& eps) {
    return envelope(to_family(p), eps);
}

Predicate predicate_pullback(const MetricMap& f, const Predicate& p) {
    require_same(f.target(), p.space(), "predicate pullback");
    std::vector<TruthValue> values(f.source()->size());
    for (std::size_t x = 0; x < values.size(); ++x) values[x] = p.value(f(x));
    return Predicate(f.source(), std::move(values), compose(p.modulus(), f.modulus()));
}

Predicate predicate_lattice(LatticeOp op, const SpacePtr& space, std::span<const Predicate> items) {
    const Quantale& q = space->quantale();
    if (items.empty()) {
        TruthValue fill = op == LatticeOp::Meet ? TruthValue(0) : q.top();
        return Predicate(space, std::vector<TruthValue>(space->size(), fill), Modulus::zero(q));
    }
    std::vector<TruthValue> values(items.front().values().begin(), items.front().values().end());
    Modulus eps = items.front().modulus();
    require_same(space, items.front().space(), "predicate lattice");
    for (const Predicate& p : items.subspan(1)) {
        require_same(space, p.space(), "predicate lattice");
        for (std::size_t x = 0; x < values.size(); ++x) {
            values[x] = op == LatticeOp::Meet ? std::max(values[x], p.value(x))
                                              : std::min(values[x], p.value(x));
        }
        eps = combine(Combine::Max, eps, p.modulus());
    }
    return Predicate(space, std::move(values), std::move(eps));
}

Predicate distance_predicate(const SpacePtr& x) {
    SpacePtr xx = product(x, x);
    std::vector<TruthValue> values(xx->size());
    const std::size_t n = x->size();
    for (std::size_t a = 0; a < values.size(); ++a) values[a] = x->distance(a / n, a % n);
    Modulus id = Modulus::identity(x->quantale());
    return Predicate(xx, std::move(values), combine(Combine::Add, id, id));
}

Predicate pair_distance_predicate(const MetricMap& f, const MetricMap& g) {
    require_same(f.source(), g.source(), "pair distance");
    require_same(f.target(), g.target(), "pair distance");
    std::vector<TruthValue> values(f.source()->size());
    for (std::size_t x = 0; x < values.size(); ++x) values[x] = f.target()->distance(f(x), g(x));
    return Predicate(f.source(), std::move(values),
                     combine(Combine::Add, f.modulus(), g.modulus()));
}

SpacePtr make_grid(std::size_t n, Quantale q) {
    if (n == 0) throw PreconditionError("grid resolution must be positive");
    std::vector<std::string> points;
    std::vector<Rational> at;
    for (std::size_t k = 0; k <= n; ++k) {
        at.push_back(Rational(k) / Rational(n));
        points.push_back(to_string(at.back()));
    }
    std::vector<TruthValue> dist;
    dist.reserve(at.size() * at.size());
    for (const Rational& a : at) {
        for (const Rational& b : at) dist.push_back(q.distance(TruthValue(a), TruthValue(b)));
    }
    return std::make_shared<const FiniteMetricSpace>("grid" + std::to_string(n), std::move(points),
                                                     std::move(dist), q);
}

Predicate truth_predicate(const SpacePtr& grid) {
    std::vector<TruthValue> values;
    for (std::size_t i = 0; i < grid->size(); ++i) {
        values.emplace_back(parse_rational(grid->label(i)));
    }
    return Predicate(grid, std::move(values), Modulus::identity(grid->quantale()));
}

std::size_t least_compatible_grid(const Predicate& p) {
    std::vector<Rational> finite;
    for (const TruthValue& v : p.values()) {
        if (v.is_infinite()) throw PreconditionError("an infinite value lies on no grid");
        finite.push_back(v.value());
    }
    Rational den = common_denominator(finite);
    return static_cast<std::size_t>(boost::multiprecision::numerator(den).convert_to<unsigned long>());
}

MetricMap classifying_map(const Predicate& p, const SpacePtr& grid, std::size_t n) {
    std::vector<std::size_t> assignment(p.space()->size());
    for (std::size_t x = 0; x < assignment.size(); ++x) {
        const TruthValue& v = p.value(x);
        if (v.is_infinite()) throw PreconditionError("an infinite value lies on no grid");
        Rational scaled = v.value() * n;
        if (boost::multiprecision::denominator(scaled) != 1 || scaled > Rational(n)) {
            throw PreconditionError("value " + to_string(v) + " at '" + p.space()->label(x) +
                                    "' is off grid " + std::to_string(n) +
                                    "; least compatible grid: " +
                                    std::to_string(least_compatible_grid(p)));
        }
        assignment[x] =
            static_cast<std::size_t>(boost::multiprecision::numerator(scaled).convert_to<unsigned long>());
    }
    return MetricMap(p.space(), grid, std::move(assignment), p.modulus());
}

} // namespace contsem
