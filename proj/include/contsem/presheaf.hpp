#pragma once

#include "contsem/metric.hpp"
#include "contsem/subobject.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace contsem {

struct MorphismDecl {
    std::string id;
    std::string source;
    std::string target;
};

/// One composition table entry: g after f is gf.
struct CompositeDecl {
    std::string g;
    std::string f;
    std::string gf;
};

struct Arrow {
    std::string id;
    std::size_t source;
    std::size_t target;
};

/// A finite category given by a composition table.
///
/// Identities are named "1_<object>"; they are added when not declared, and
/// every composite with an identity is filled in. Construction rejects
/// unknown names and contradictory entries; validate_category() checks
/// totality, associativity and the unit laws.
class FinCategory {
public:
    FinCategory(std::vector<std::string> objects, std::vector<MorphismDecl> morphisms,
                std::vector<CompositeDecl> composition);

    std::size_t object_count() const noexcept { return objects_.size(); }
    std::size_t morphism_count() const noexcept { return arrows_.size(); }
    const std::string& object(std::size_t a) const { return objects_.at(a); }
    const std::vector<std::string>& objects() const noexcept { return objects_; }
    const Arrow& arrow(std::size_t m) const { return arrows_.at(m); }
    std::optional<std::size_t> object_index(std::string_view label) const;
    std::optional<std::size_t> morphism_index(std::string_view id) const;

    std::size_t identity(std::size_t a) const { return identities_.at(a); }
    bool is_identity(std::size_t m) const;

    /// g after f; nullopt when not composable or missing from the table.
    std::optional<std::size_t> compose(std::size_t g, std::size_t f) const {
        return composite_[g * arrows_.size() + f];
    }

    /// Morphisms with the given target, in index order.
    const std::vector<std::size_t>& morphisms_into(std::size_t a) const { return into_.at(a); }
    /// Position of m within morphisms_into(target of m).
    std::size_t position_into(std::size_t m) const { return position_.at(m); }

    friend bool operator==(const FinCategory& a, const FinCategory& b) {
        return a.objects_ == b.objects_ && a.composite_ == b.composite_ &&
               a.arrow_ids() == b.arrow_ids();
    }

private:
    std::vector<std::string> arrow_ids() const;

    std::vector<std::string> objects_;
    std::vector<Arrow> arrows_;
    std::vector<std::size_t> identities_;
    std::vector<std::optional<std::size_t>> composite_;
    std::vector<std::vector<std::size_t>> into_;
    std::vector<std::size_t> position_;
};

using CategoryPtr = std::shared_ptr<const FinCategory>;

std::optional<Violation> validate_category(const FinCategory& c);

/// Constructs and validates.
CategoryPtr make_category(std::vector<std::string> objects, std::vector<MorphismDecl> morphisms,
                          std::vector<CompositeDecl> composition);

/// A functor C^op -> finite pseudometric spaces. restriction(m) for m: b -> a
/// sends points of F(a) to points of F(b). Identity restrictions may be left
/// empty and are filled in.
class MetricPresheaf {
public:
    MetricPresheaf(CategoryPtr category, std::vector<SpacePtr> spaces,
                   std::vector<std::vector<std::size_t>> restrictions,
                   std::vector<std::shared_ptr<const MetricPresheaf>> factors = {});

    const CategoryPtr& category() const noexcept { return category_; }
    const SpacePtr& at(std::size_t a) const { return spaces_.at(a); }
    const std::vector<SpacePtr>& spaces() const noexcept { return spaces_; }
    const std::vector<std::size_t>& restriction(std::size_t m) const { return restrictions_.at(m); }
    std::size_t restrict(std::size_t m, std::size_t x) const { return restrictions_[m][x]; }
    const Quantale& quantale() const { return spaces_.front()->quantale(); }
    const std::vector<std::shared_ptr<const MetricPresheaf>>& factors() const noexcept {
        return factors_;
    }

    friend bool operator==(const MetricPresheaf& a, const MetricPresheaf& b);

private:
    CategoryPtr category_;
    std::vector<SpacePtr> spaces_;
    std::vector<std::vector<std::size_t>> restrictions_;
    std::vector<std::shared_ptr<const MetricPresheaf>> factors_;
};

using PresheafPtr = std::shared_ptr<const MetricPresheaf>;

bool same_presheaf(const PresheafPtr& a, const PresheafPtr& b);

/// Component spaces, functoriality and 1-Lipschitz restrictions.
std::optional<Violation> validate_presheaf(const MetricPresheaf& f);

PresheafPtr make_presheaf(CategoryPtr category, std::vector<SpacePtr> spaces,
                          std::vector<std::vector<std::size_t>> restrictions);

/// Every object sent to the one-point space.
PresheafPtr terminal_presheaf(const CategoryPtr& c, Quantale q = Quantale{});

/// Objectwise max-metric products; point (x, y) at index x * |G a| + y.
PresheafPtr presheaf_product(const PresheafPtr& f, const PresheafPtr& g);

/// Objectwise point sets closed under restriction.
class PresheafSub {
public:
    /// Throws PreconditionError when not restriction-closed.
    PresheafSub(PresheafPtr presheaf, std::vector<std::vector<bool>> members);

    static PresheafSub full(const PresheafPtr& f);
    static PresheafSub empty(const PresheafPtr& f);

    const PresheafPtr& presheaf() const noexcept { return presheaf_; }
    const std::vector<std::vector<bool>>& members() const noexcept { return members_; }
    bool contains(std::size_t a, std::size_t x) const { return members_[a][x]; }

    friend bool operator==(const PresheafSub& a, const PresheafSub& b) {
        return same_presheaf(a.presheaf_, b.presheaf_) && a.members_ == b.members_;
    }

private:
    PresheafPtr presheaf_;
    std::vector<std::vector<bool>> members_;
};

bool is_presheaf_sub(const MetricPresheaf& f, const std::vector<std::vector<bool>>& members);

/// Objectwise containment.
bool leq(const PresheafSub& a, const PresheafSub& b);

PresheafSub presheaf_sub_lattice(LatticeOp op, const PresheafPtr& f,
                                 std::span<const PresheafSub> items);

/// Componentwise point functions F(a) -> G(a).
struct NaturalTransformation {
    PresheafPtr source;
    PresheafPtr target;
    std::vector<std::vector<std::size_t>> components;

    std::size_t operator()(std::size_t a, std::size_t x) const { return components[a][x]; }
};

/// Naturality squares and 1-Lipschitz components.
std::optional<Violation> validate_natural(const NaturalTransformation& phi);

/// Natural, and every component injective and distance preserving.
bool is_regular_mono_presheaf(const NaturalTransformation& phi);

NaturalTransformation identity_natural(const PresheafPtr& f);

/// Coordinate projection of a presheaf built by presheaf_product().
NaturalTransformation presheaf_projection(const PresheafPtr& product, std::size_t factor);

PresheafSub presheaf_pullback_sub(const NaturalTransformation& phi, const PresheafSub& b);

/// Objectwise image; throws when phi is not natural and 1-Lipschitz.
PresheafSub presheaf_rimage(const NaturalTransformation& phi);

/// D_F(r) as a sub of F x F, for the given product presheaf.
PresheafSub presheaf_distance(const PresheafPtr& ff, const TruthValue& r);

/// Values per object, 1-Lipschitz on each component and non-increasing along
/// restrictions.
class PresheafPredicate {
public:
    /// Throws PreconditionError naming a witness.
    PresheafPredicate(PresheafPtr presheaf, std::vector<std::vector<TruthValue>> values);

    const PresheafPtr& presheaf() const noexcept { return presheaf_; }
    const std::vector<std::vector<TruthValue>>& values() const noexcept { return values_; }
    const TruthValue& value(std::size_t a, std::size_t x) const { return values_[a][x]; }

    friend bool operator==(const PresheafPredicate& a, const PresheafPredicate& b) {
        return same_presheaf(a.presheaf_, b.presheaf_) && a.values_ == b.values_;
    }

private:
    PresheafPtr presheaf_;
    std::vector<std::vector<TruthValue>> values_;
};

std::optional<Violation> presheaf_predicate_violation(
    const MetricPresheaf& f, const std::vector<std::vector<TruthValue>>& values);

bool is_presheaf_predicate(const MetricPresheaf& f,
                           const std::vector<std::vector<TruthValue>>& values);

/// Sub order: a <= b iff b's values are pointwise below a's.
bool leq(const PresheafPredicate& a, const PresheafPredicate& b);

/// Greatest presheaf predicate below the given values.
PresheafPredicate presheaf_envelope(const PresheafPtr& f,
                                    const std::vector<std::vector<TruthValue>>& thresholds);

/// Least presheaf predicate values above the given ones.
PresheafPredicate presheaf_upper_envelope(const PresheafPtr& f,
                                          const std::vector<std::vector<TruthValue>>& floor);

PresheafPredicate presheaf_predicate_pullback(const NaturalTransformation& phi,
                                              const PresheafPredicate& p);

/// Objectwise fiber minimum (top on empty fibers), then presheaf_envelope.
PresheafPredicate presheaf_exists(const NaturalTransformation& phi, const PresheafPredicate& r);

/// Right adjoint to pullback along a product projection: objectwise fiber
/// maximum, then the least presheaf predicate above it. Throws on an
/// uninhabited index component.
PresheafPredicate presheaf_forall(const NaturalTransformation& pi, const PresheafPredicate& r);

/// A threshold-graded sieve on an object: theta is indexed like
/// morphisms_into(object), and f is in S(r) iff theta(f) <= r.
struct OmegaElement {
    CategoryPtr category;
    std::size_t object;
    std::vector<TruthValue> theta;

    const TruthValue& at(std::size_t m) const { return theta[category->position_into(m)]; }

    friend bool operator==(const OmegaElement& a, const OmegaElement& b) {
        return a.object == b.object && a.theta == b.theta;
    }
};

/// theta(f . h) <= theta(f) for all composable h. Throws when not.
void validate_omega(const OmegaElement& s);

TruthValue omega_nu(const OmegaElement& s);
OmegaElement omega_restrict(std::size_t f, const OmegaElement& s);
TruthValue omega_distance(const OmegaElement& s1, const OmegaElement& s2, const Quantale& q);

/// phi[a][x] for each object a and point x of F(a).
using Classification = std::vector<std::vector<OmegaElement>>;

Classification classify_presheaf(const PresheafPredicate& r);

/// Naturality and componentwise 1-Lipschitz of a classification.
std::optional<Violation> validate_classification(const MetricPresheaf& f, const Classification& phi);

/// value_a(x) = nu(phi_a(x)). Throws when phi fails validation.
PresheafPredicate pullback_truth(const PresheafPtr& f, const Classification& phi);

} // namespace contsem
