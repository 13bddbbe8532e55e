#pragma once

#include "contsem/modulus.hpp"
#include "contsem/quantale.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace contsem {

class FiniteMetricSpace;
using SpacePtr = std::shared_ptr<const FiniteMetricSpace>;

/// A finite pseudometric space with an exact distance matrix.
///
/// Construction only checks the matrix shape; validate_space() checks the
/// pseudometric axioms, and make_space() does both. Distinct points may sit
/// at distance 0.
class FiniteMetricSpace {
public:
    FiniteMetricSpace(std::string id, std::vector<std::string> points,
                      std::vector<TruthValue> distances, Quantale q = Quantale{},
                      std::vector<SpacePtr> factors = {});

    const std::string& id() const noexcept { return id_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    const std::string& label(std::size_t i) const { return points_.at(i); }
    std::span<const std::string> labels() const noexcept { return points_; }
    std::optional<std::size_t> index_of(std::string_view label) const;

    const TruthValue& distance(std::size_t i, std::size_t j) const {
        return distances_[i * points_.size() + j];
    }
    std::span<const TruthValue> distances() const noexcept { return distances_; }

    const Quantale& quantale() const noexcept { return quantale_; }

    /// The two factors when this space was built by product(); empty otherwise.
    std::span<const SpacePtr> factors() const noexcept { return factors_; }

    friend bool operator==(const FiniteMetricSpace& a, const FiniteMetricSpace& b) {
        return a.id_ == b.id_ && a.points_ == b.points_ && a.distances_ == b.distances_ &&
               a.quantale_ == b.quantale_;
    }

private:
    std::string id_;
    std::vector<std::string> points_;
    std::vector<TruthValue> distances_;
    Quantale quantale_;
    std::vector<SpacePtr> factors_;
};

/// Pointer identity, falling back to structural equality.
bool same_space(const SpacePtr& a, const SpacePtr& b);

/// A named axiom failure with the offending points.
struct Violation {
    std::string axiom;
    std::vector<std::string> witnesses;
    std::string message;
};

/// Checks range, reflexivity, symmetry and the triangle inequality, in that
/// order, and reports the first failure.
std::optional<Violation> validate_space(const FiniteMetricSpace& space);

/// Builds and validates; throws PreconditionError carrying the violation.
SpacePtr make_space(std::string id, std::vector<std::string> points,
                    std::vector<TruthValue> distances, Quantale q = Quantale{});

/// The one-point space.
SpacePtr terminal_space(Quantale q = Quantale{});

/// Max-metric product with lexicographic point order: (i, j) sits at index
/// i * |Y| + j.
SpacePtr product(const SpacePtr& x, const SpacePtr& y);

/// The subspace on the given points (in ascending index order).
SpacePtr subspace(const SpacePtr& x, const std::vector<bool>& members, std::string id = {});

/// d(x,y) <= eps(d(x',y')) pair check for a point function between spaces.
bool check_modulus(const FiniteMetricSpace& source, const FiniteMetricSpace& target,
                   std::span<const std::size_t> assignment, const Modulus& eps);

/// Same check for a function into the carrier with its |a - b| metric.
bool check_modulus(const FiniteMetricSpace& source, std::span<const TruthValue> values,
                   const Modulus& eps);

/// The pointwise-least modulus valid for the function: the step function
/// r -> max{ d(f x, f x') : d(x, x') <= r }. Throws when a zero-distance pair
/// is sent to a positive distance.
///
/// In extended-nonneg mode, pairs at infinite source distance cannot be
/// placed at a finite breakpoint; they are covered by one extra step one unit
/// past the largest finite source distance, which keeps the result valid but
/// not least beyond that point.
Modulus tightest_modulus(const FiniteMetricSpace& source, const FiniteMetricSpace& target,
                         std::span<const std::size_t> assignment);
Modulus tightest_modulus(const FiniteMetricSpace& source, std::span<const TruthValue> values);

/// A point function between finite spaces together with a declared modulus.
class MetricMap {
public:
    /// Declared modulus defaults to the tightest one.
    MetricMap(SpacePtr source, SpacePtr target, std::vector<std::size_t> assignment);
    /// Throws PreconditionError when the declared modulus does not hold.
    MetricMap(SpacePtr source, SpacePtr target, std::vector<std::size_t> assignment,
              Modulus modulus);

    const SpacePtr& source() const noexcept { return source_; }
    const SpacePtr& target() const noexcept { return target_; }
    std::span<const std::size_t> assignment() const noexcept { return assignment_; }
    std::size_t operator()(std::size_t x) const { return assignment_[x]; }
    const Modulus& modulus() const noexcept { return modulus_; }

    friend bool operator==(const MetricMap& a, const MetricMap& b) {
        return same_space(a.source_, b.source_) && same_space(a.target_, b.target_) &&
               a.assignment_ == b.assignment_ && a.modulus_ == b.modulus_;
    }

private:
    SpacePtr source_;
    SpacePtr target_;
    std::vector<std::size_t> assignment_;
    Modulus modulus_;
};

MetricMap identity_map(const SpacePtr& x);

/// g after f, with declared modulus eps_g after eps_f.
MetricMap compose_maps(const MetricMap& g, const MetricMap& f);

/// x -> (f x, g x) into the product of the targets, modulus max(eps_f, eps_g).
MetricMap pair_maps(const MetricMap& f, const MetricMap& g);

/// Coordinate projection of a space built by product(), modulus id.
MetricMap projection_map(const SpacePtr& product_space, std::size_t factor);

/// Which factor a map projects onto, if it is a coordinate projection of a
/// binary product.
std::optional<std::size_t> projected_factor(const MetricMap& m);

/// Decides whether m is (equivalent to) an isometric embedding in the
/// category whose maps carry moduli from e. Under E1 that means injective and
/// distance preserving; under EL and EuPL injective and reflecting zero
/// distances suffices on finite spaces.
bool is_regular_mono(const MetricMap& m, Moduloid e);

} // namespace contsem
