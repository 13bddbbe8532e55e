#pragma once

#include "contsem/metric.hpp"
#include "contsem/predicate.hpp"
#include "contsem/presheaf.hpp"

#include <cstdint>
#include <random>

namespace contsem::gen {

using Rng = std::mt19937_64;

/// Uniform in [0, n). Plain modulo keeps case lists identical across
/// standard libraries for a fixed seed.
inline std::size_t uniform(Rng& rng, std::size_t n) { return n == 0 ? 0 : rng() % n; }

inline bool coin(Rng& rng, std::size_t one_in = 2) { return uniform(rng, one_in) == 0; }

/// k/den with k uniform in [lo, hi].
Rational grid_rational(Rng& rng, long den, long lo, long hi);

/// A space with n points whose distances are multiples of 1/den: random
/// edge weights closed under shortest paths. With allow_zero, some distinct
/// points may end up at distance 0.
SpacePtr random_space(Rng& rng, const std::string& id, std::size_t n, long den,
                      bool allow_zero = false, Quantale q = Quantale{});

/// A random point function that sends zero-distance pairs to equal points,
/// so a modulus always exists; declared modulus is the tightest one.
MetricMap random_map(Rng& rng, const SpacePtr& source, const SpacePtr& target);

/// A random modulus: a mix of Lipschitz, step and general piecewise shapes
/// with breakpoints on multiples of 1/den.
Modulus random_modulus(Rng& rng, long den, Quantale q = Quantale{});

/// A Lipschitz-K or identity modulus with integer K, which keeps grid values
/// on the grid.
Modulus random_grid_modulus(Rng& rng);

/// Random thresholds on multiples of 1/den, closed into an eps-predicate.
Predicate random_predicate(Rng& rng, const SpacePtr& space, const Modulus& eps, long den);

/// A small category with each morphism written as a word of generators in
/// application order (empty for identities).
struct RandomCategory {
    CategoryPtr category;
    std::vector<std::vector<std::size_t>> words;
};

/// Free categories on small DAGs, small monoids, and a monoid glued to a free
/// arrow; at most 3 objects and 6 morphisms.
RandomCategory random_category(Rng& rng);

/// Components of at most max_points points with distances on multiples of
/// 1/den. Generator restrictions are random non-expansive maps; when the
/// relations of the category are not met after a few attempts, falls back to
/// a constant presheaf.
PresheafPtr random_presheaf(Rng& rng, const RandomCategory& c, std::size_t max_points, long den);

/// Random thresholds on multiples of 1/den closed into a presheaf predicate.
PresheafPredicate random_presheaf_predicate(Rng& rng, const PresheafPtr& f, long den);

} // namespace contsem::gen
