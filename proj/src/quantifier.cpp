#include "contsem/quantifier.hpp"

#include "contsem/error.hpp"

namespace contsem {

namespace {

void require_source(const MetricMap& f, const Predicate& r) {
    if (!same_space(f.source(), r.space())) {
        throw PreconditionError("predicate lives on '" + r.space()->id() + "', not on the source '" +
                                f.source()->id() + "' of the map");
    }
}

void require_projection(const MetricMap& pi, const Predicate& r) {
    require_source(pi, r);
    if (!projected_factor(pi)) {
        throw PreconditionError("map from '" + pi.source()->id() +
                                "' is not a coordinate projection of a binary product");
    }
}

void require_inhabited(const MetricMap& pi) {
    std::size_t factor = *projected_factor(pi);
    if (pi.source()->factors()[1 - factor]->empty()) {
        throw PreconditionError("forall requires inhabited factor");
    }
}

} // namespace

IndexedFamily raw_exists(const MetricMap& f, const Predicate& r) {
    require_source(f, r);
    const Quantale& q = r.space()->quantale();
    std::vector<TruthValue> thresholds(f.target()->size(), q.top());
    std::vector<bool> attained(f.target()->size(), false);
    for (std::size_t x = 0; x < r.values().size(); ++x) {
        std::size_t y = f(x);
        if (!attained[y] || r.value(x) < thresholds[y]) thresholds[y] = r.value(x);
        attained[y] = true;
    }
    return IndexedFamily(f.target(), std::move(thresholds), std::move(attained));
}

IndexedFamily raw_forall(const MetricMap& pi, const Predicate& r) {
    require_projection(pi, r);
    require_inhabited(pi);
    std::vector<TruthValue> thresholds(pi.target()->size(), TruthValue(0));
    for (std::size_t x = 0; x < r.values().size(); ++x) {
        std::size_t y = pi(x);
        if (r.value(x) > thresholds[y]) thresholds[y] = r.value(x);
    }
    return IndexedFamily(pi.target(), std::move(thresholds));
}

Predicate exists_along(const MetricMap& f, const Predicate& r, const Modulus& eps) {
    require_source(f, r);
    if (!leq(r.modulus(), compose(eps, f.modulus()))) {
        throw PreconditionError("modulus mismatch: predicate modulus " + to_string(r.modulus()) +
                                " is not below " + to_string(eps) + " after " +
                                to_string(f.modulus()));
    }
    return envelope(raw_exists(f, r), eps);
}

Predicate exists_along(const MetricMap& f, const Predicate& r) {
    if (f.modulus() != Modulus::identity(f.source()->quantale())) {
        throw PreconditionError("exists_along needs an explicit target modulus for maps with "
                                "modulus " + to_string(f.modulus()));
    }
    return exists_along(f, r, r.modulus());
}

Predicate forall_proj(const MetricMap& pi, const Predicate& r) {
    require_projection(pi, r);
    require_inhabited(pi);
    return envelope(raw_forall(pi, r), r.modulus());
}

Predicate quantify_direct(Quantifier kind, const MetricMap& pi, const Predicate& r) {
    require_projection(pi, r);
    if (kind == Quantifier::Sup) {
        require_inhabited(pi);
        return to_predicate(raw_forall(pi, r), r.modulus());
    }
    const Quantale& q = r.space()->quantale();
    std::vector<TruthValue> values(pi.target()->size(), q.top());
    std::vector<bool> seen(values.size(), false);
    for (std::size_t x = 0; x < r.values().size(); ++x) {
        std::size_t y = pi(x);
        if (!seen[y] || r.value(x) < values[y]) values[y] = r.value(x);
        seen[y] = true;
    }
    return Predicate(pi.target(), std::move(values), r.modulus());
}

} // namespace contsem
