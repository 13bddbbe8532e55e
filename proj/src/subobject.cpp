#include "contsem/subobject.hpp"

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

} // namespace

Subobject::Subobject(SpacePtr space, std::vector<bool> members)
    : space_(std::move(space)), members_(std::move(members)) {
    if (members_.size() != space_->size()) {
        throw PreconditionError("subobject of '" + space_->id() + "' has the wrong size");
    }
}

Subobject Subobject::empty(const SpacePtr& space) {
    return Subobject(space, std::vector<bool>(space->size(), false));
}

Subobject Subobject::full(const SpacePtr& space) {
    return Subobject(space, std::vector<bool>(space->size(), true));
}

Subobject Subobject::of(const SpacePtr& space, std::span<const std::string> labels) {
    std::vector<bool> members(space->size(), false);
    for (const std::string& l : labels) {
        auto i = space->index_of(l);
        if (!i) throw PreconditionError("'" + l + "' is not a point of '" + space->id() + "'");
        members[*i] = true;
    }
    return Subobject(space, std::move(members));
}

std::size_t Subobject::size() const noexcept {
    return static_cast<std::size_t>(std::count(members_.begin(), members_.end(), true));
}

std::vector<std::string> Subobject::labels() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < members_.size(); ++i) {
        if (members_[i]) out.push_back(space_->label(i));
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool leq(const Subobject& a, const Subobject& b) {
    require_same(a.space(), b.space(), "subobject order");
    for (std::size_t i = 0; i < a.members().size(); ++i) {
        if (a.contains(i) && !b.contains(i)) return false;
    }
    return true;
}

Subobject sub_lattice(LatticeOp op, const SpacePtr& space, std::span<const Subobject> items) {
    std::vector<bool> acc(space->size(), op == LatticeOp::Meet);
    for (const Subobject& s : items) {
        require_same(space, s.space(), "subobject lattice");
        for (std::size_t i = 0; i < acc.size(); ++i) {
            acc[i] = op == LatticeOp::Meet ? (acc[i] && s.contains(i)) : (acc[i] || s.contains(i));
        }
    }
    return Subobject(space, std::move(acc));
}

Subobject meet(const Subobject& a, const Subobject& b) {
    const Subobject items[] = {a, b};
    return sub_lattice(LatticeOp::Meet, a.space(), items);
}

Subobject join(const Subobject& a, const Subobject& b) {
    const Subobject items[] = {a, b};
    return sub_lattice(LatticeOp::Join, a.space(), items);
}

Subobject complement(const Subobject& a) {
    std::vector<bool> members = a.members();
    members.flip();
    return Subobject(a.space(), std::move(members));
}

Subobject pullback_sub(const MetricMap& f, const Subobject& b) {
    require_same(f.target(), b.space(), "pullback");
    std::vector<bool> members(f.source()->size());
    for (std::size_t x = 0; x < members.size(); ++x) members[x] = b.contains(f(x));
    return Subobject(f.source(), std::move(members));
}

Subobject exists_sub(const MetricMap& f, const Subobject& a) {
    require_same(f.source(), a.space(), "image");
    std::vector<bool> members(f.target()->size(), false);
    for (std::size_t x = 0; x < a.members().size(); ++x) {
        if (a.contains(x)) members[f(x)] = true;
    }
    return Subobject(f.target(), std::move(members));
}

Subobject forall_sub(const MetricMap& f, const Subobject& a) {
    require_same(f.source(), a.space(), "universal image");
    std::vector<bool> members(f.target()->size(), true);
    for (std::size_t x = 0; x < a.members().size(); ++x) {
        if (!a.contains(x)) members[f(x)] = false;
    }
    return Subobject(f.target(), std::move(members));
}

Subobject heyting_implies(const Subobject& a, const Subobject& b) {
    require_same(a.space(), b.space(), "implication");
    std::vector<bool> members(a.members().size());
    for (std::size_t i = 0; i < members.size(); ++i) members[i] = !a.contains(i) || b.contains(i);
    return Subobject(a.space(), std::move(members));
}

ImageFactorization r_image(const MetricMap& f) {
    Subobject image = exists_sub(f, Subobject::full(f.source()));
    SpacePtr img = subspace(f.target(), image.members(), f.target()->id() + "|image");
    std::vector<std::size_t> position(f.target()->size(), 0);
    std::vector<std::size_t> inclusion;
    for (std::size_t y = 0; y < position.size(); ++y) {
        if (image.contains(y)) {
            position[y] = inclusion.size();
            inclusion.push_back(y);
        }
    }
    std::vector<std::size_t> onto(f.source()->size());
    for (std::size_t x = 0; x < onto.size(); ++x) onto[x] = position[f(x)];
    return ImageFactorization{
        MetricMap(f.source(), img, std::move(onto), f.modulus()),
        MetricMap(img, f.target(), std::move(inclusion), Modulus::identity(img->quantale()))};
}

PullbackSquare pullback_square(const MetricMap& f, const MetricMap& g) {
    require_same(f.target(), g.target(), "pullback square");
    SpacePtr xy = product(f.source(), g.source());
    const std::size_t ny = g.source()->size();
    std::vector<bool> members(xy->size());
    for (std::size_t a = 0; a < members.size(); ++a) members[a] = f(a / ny) == g(a % ny);
    SpacePtr apex = subspace(xy, members, f.source()->id() + "x_" + f.target()->id() + "_" +
                                              g.source()->id());
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t a = 0; a < members.size(); ++a) {
        if (!members[a]) continue;
        left.push_back(a / ny);
        right.push_back(a % ny);
    }
    Modulus id = Modulus::identity(apex->quantale());
    return PullbackSquare{apex, MetricMap(apex, f.source(), std::move(left), id),
                          MetricMap(apex, g.source(), std::move(right), id)};
}

} // namespace contsem
