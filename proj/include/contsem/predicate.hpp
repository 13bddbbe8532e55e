#pragma once

#include "contsem/metric.hpp"
#include "contsem/subobject.hpp"

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace contsem {

/// A monotone family r -> R(r) of subobjects, stored as one threshold per
/// point: x is in R(r) iff threshold(x) < r, or threshold(x) = r and the
/// threshold is attained. Every monotone family on a finite space has this
/// form.
class IndexedFamily {
public:
    /// All thresholds attained.
    IndexedFamily(SpacePtr space, std::vector<TruthValue> thresholds);
    IndexedFamily(SpacePtr space, std::vector<TruthValue> thresholds, std::vector<bool> attained);

    const SpacePtr& space() const noexcept { return space_; }
    std::span<const TruthValue> thresholds() const noexcept { return thresholds_; }
    const TruthValue& threshold(std::size_t x) const { return thresholds_[x]; }
    const std::vector<bool>& attained() const noexcept { return attained_; }
    bool attained(std::size_t x) const { return attained_[x]; }

    /// Closed under infima, i.e. R(inf r_i) is the meet of the R(r_i).
    bool meet_closed() const;

    /// The subobject R(r).
    Subobject level(const TruthValue& r) const;

    /// Smallest meet-closed family above this one: every threshold attained.
    IndexedFamily closure() const;

    friend bool operator==(const IndexedFamily& a, const IndexedFamily& b) {
        return same_space(a.space_, b.space_) && a.thresholds_ == b.thresholds_ &&
               a.attained_ == b.attained_;
    }

private:
    SpacePtr space_;
    std::vector<TruthValue> thresholds_;
    std::vector<bool> attained_;
};

/// A value function X -> carrier with a modulus of continuity: for all x, y,
/// value(y) <= value(x) (x) eps(d(x, y)).
class Predicate {
public:
    /// Throws PreconditionError naming a witness pair when the values are not
    /// continuous with the given modulus.
    Predicate(SpacePtr space, std::vector<TruthValue> values, Modulus modulus);

    const SpacePtr& space() const noexcept { return space_; }
    std::span<const TruthValue> values() const noexcept { return values_; }
    const TruthValue& value(std::size_t x) const { return values_[x]; }
    const Modulus& modulus() const noexcept { return modulus_; }

    friend bool operator==(const Predicate& a, const Predicate& b) {
        return same_space(a.space_, b.space_) && a.values_ == b.values_ &&
               a.modulus_ == b.modulus_;
    }

private:
    SpacePtr space_;
    std::vector<TruthValue> values_;
    Modulus modulus_;
};

/// First pair (x, y) with value(y) > value(x) (x) eps(d(x, y)), if any.
std::optional<std::pair<std::size_t, std::size_t>>
continuity_witness(const FiniteMetricSpace& space, std::span<const TruthValue> values,
                   const Modulus& eps);

/// Subobject order on families: R(r) contained in S(r) for every r.
bool leq(const IndexedFamily& r, const IndexedFamily& s);
/// Subobject order on predicates: a <= b iff b.value <= a.value pointwise.
bool leq(const Predicate& a, const Predicate& b);

bool is_epsilon_predicate(const IndexedFamily& r, const Modulus& eps);

/// Throws PreconditionError with a witness when R is not an eps-predicate.
Predicate to_predicate(const IndexedFamily& r, const Modulus& eps);

IndexedFamily to_family(const Predicate& p);

/// The least eps-predicate above R: the greatest eps-continuous function
/// below the thresholds of R's infimum closure.
///
/// Computed as multi-source shortest paths on the complete graph over the
/// points with edge cost eps(d(u, v)) and source potential threshold(y):
/// value(x) = min_y threshold(y) (x) cost(y ~> x). Relaxation across every
/// single edge makes the result eps-continuous; any eps-continuous h below
/// the thresholds is bounded along every path, hence lies below the result.
Predicate envelope(const IndexedFamily& r, const Modulus& eps);

/// envelope(to_family(p), eps).
Predicate restrict_envelope(const Predicate& p, const Modulus& eps);

/// value . f with modulus eps_P . eps_f.
Predicate predicate_pullback(const MetricMap& f, const Predicate& p);

/// Meet is the pointwise maximum of values, join the pointwise minimum; the
/// modulus is the max of the item moduli. The empty meet is the all-zero
/// predicate and the empty join the all-top predicate, both with the zero
/// modulus.
Predicate predicate_lattice(LatticeOp op, const SpacePtr& space, std::span<const Predicate> items);

/// d on X*X with modulus id + id.
Predicate distance_predicate(const SpacePtr& x);

/// x -> d(f x, g x) with modulus eps_f + eps_g.
Predicate pair_distance_predicate(const MetricMap& f, const MetricMap& g);

/// Points 0, 1/n, ..., 1 with the absolute-difference metric.
SpacePtr make_grid(std::size_t n, Quantale q = Quantale{});

/// value(p) = p with modulus id on a grid space.
Predicate truth_predicate(const SpacePtr& grid);

/// Least n such that every value is a multiple of 1/n. Throws on an
/// infinite value.
std::size_t least_compatible_grid(const Predicate& p);

/// The map X -> grid(n) classifying p. Throws PreconditionError reporting
/// least_compatible_grid when some value is off the grid.
MetricMap classifying_map(const Predicate& p, const SpacePtr& grid, std::size_t n);

} // namespace contsem
