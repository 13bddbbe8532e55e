#pragma once

#include "contsem/metric.hpp"

#include <span>
#include <string>
#include <vector>

namespace contsem {

/// A subobject of a finite space: a set of its points. Every subset carries
/// the subspace metric, so no metric data is stored here.
class Subobject {
public:
    Subobject(SpacePtr space, std::vector<bool> members);

    static Subobject empty(const SpacePtr& space);
    static Subobject full(const SpacePtr& space);
    /// Throws PreconditionError on an unknown label.
    static Subobject of(const SpacePtr& space, std::span<const std::string> labels);

    const SpacePtr& space() const noexcept { return space_; }
    const std::vector<bool>& members() const noexcept { return members_; }
    bool contains(std::size_t point) const { return members_[point]; }
    std::size_t size() const noexcept;
    /// Sorted member labels, the serialized form.
    std::vector<std::string> labels() const;

    friend bool operator==(const Subobject& a, const Subobject& b) {
        return same_space(a.space_, b.space_) && a.members_ == b.members_;
    }

private:
    SpacePtr space_;
    std::vector<bool> members_;
};

bool leq(const Subobject& a, const Subobject& b);

enum class LatticeOp { Meet, Join };

/// Intersection or union; the empty meet is the full set and the empty join
/// the empty set.
Subobject sub_lattice(LatticeOp op, const SpacePtr& space, std::span<const Subobject> items);

Subobject meet(const Subobject& a, const Subobject& b);
Subobject join(const Subobject& a, const Subobject& b);
Subobject complement(const Subobject& a);

/// f*B, the preimage.
Subobject pullback_sub(const MetricMap& f, const Subobject& b);

/// Image of A; left adjoint to pullback_sub.
Subobject exists_sub(const MetricMap& f, const Subobject& a);

/// { y | every x with f x = y lies in A }; right adjoint to pullback_sub.
Subobject forall_sub(const MetricMap& f, const Subobject& a);

/// complement(A) union B.
Subobject heyting_implies(const Subobject& a, const Subobject& b);

/// The r-image factorization f = inclusion . surjection, where the inclusion
/// is the isometric embedding of the image points.
struct ImageFactorization {
    MetricMap surjection;
    MetricMap inclusion;
};

ImageFactorization r_image(const MetricMap& f);

/// Pullback of a cospan X -f-> Z <-g- Y: the subspace of X*Y on the pairs
/// with f x = g y, and its two projections.
struct PullbackSquare {
    SpacePtr apex;
    MetricMap to_left;
    MetricMap to_right;
};

PullbackSquare pullback_square(const MetricMap& f, const MetricMap& g);

} // namespace contsem
