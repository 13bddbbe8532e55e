#pragma once

#include "contsem/predicate.hpp"

namespace contsem {

/// Pointwise direct image of every sublevel: threshold(y) is the least value
/// over the fiber of y. Points with an empty fiber never enter the image, so
/// they get the carrier top, unattained.
IndexedFamily raw_exists(const MetricMap& f, const Predicate& r);

/// Pointwise universal image along a projection Y*X -> X: threshold(x) is
/// the largest value over the fiber. Throws when Y is empty.
IndexedFamily raw_forall(const MetricMap& pi, const Predicate& r);

/// Left adjoint to predicate_pullback(f, -) between eps-predicates on the
/// target and (eps . eps_f)-predicates on the source: the envelope at eps of
/// the raw direct image. R's modulus must be below eps . eps_f.
Predicate exists_along(const MetricMap& f, const Predicate& r, const Modulus& eps);

/// exists_along with eps = eps_R, for maps whose modulus is the identity
/// (coordinate projections in particular).
Predicate exists_along(const MetricMap& f, const Predicate& r);

/// Right adjoint to pullback along a coordinate projection pi: Y*X -> X at
/// the modulus of R: the envelope of the raw universal image. Y must be
/// inhabited.
Predicate forall_proj(const MetricMap& pi, const Predicate& r);

enum class Quantifier { Inf, Sup };

/// inf or sup of the values over the quantified coordinate, keeping eps_R.
Predicate quantify_direct(Quantifier kind, const MetricMap& pi, const Predicate& r);

} // namespace contsem
