#include "contsem/metric.hpp"

#include "contsem/error.hpp"

#include <algorithm>
#include <map>

namespace contsem {

namespace {

template <class ImageDistance>
bool check_pairs(const FiniteMetricSpace& source, const Modulus& eps, ImageDistance&& image) {
    const std::size_t n = source.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (image(i, j) > eps(source.distance(i, j))) return false;
        }
    }
    return true;
}

template <class ImageDistance>
Modulus tightest(const FiniteMetricSpace& source, ImageDistance&& image) {
    const Quantale& q = source.quantale();
    const std::size_t n = source.size();
    // Largest image distance per finite source distance, plus the infinite bucket.
    std::map<Rational, TruthValue> by_distance;
    std::optional<TruthValue> at_infinity;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const TruthValue& dx = source.distance(i, j);
            TruthValue dy = image(i, j);
            if (dx.is_infinite()) {
                at_infinity = at_infinity ? std::max(*at_infinity, dy) : dy;
                continue;
            }
            if (dx.value() == 0 && dy > TruthValue(0)) {
                throw PreconditionError("not uniformly continuous as a pseudometric map: points '" +
                                        source.label(i) + "' and '" + source.label(j) +
                                        "' are at distance 0 but their images are at distance " +
                                        to_string(dy));
            }
            auto [it, inserted] = by_distance.emplace(dx.value(), dy);
            if (!inserted) it->second = std::max(it->second, dy);
        }
    }

    std::vector<std::pair<Rational, TruthValue>> jumps;
    TruthValue running(0);
    Rational last_position(0);
    for (auto& [dx, dy] : by_distance) {
        last_position = dx;
        if (dx == 0 || !(dy > running)) continue;
        running = dy;
        jumps.emplace_back(dx, dy);
    }
    if (at_infinity && *at_infinity > running) {
        jumps.emplace_back(last_position + 1, *at_infinity);
    }
    return Modulus::step(std::move(jumps), q);
}

std::string join_labels(const FiniteMetricSpace& x, std::size_t i, std::size_t j) {
    return "(" + x.label(i) + "," + x.label(j) + ")";
}

} // namespace

FiniteMetricSpace::FiniteMetricSpace(std::string id, std::vector<std::string> points,
                                     std::vector<TruthValue> distances, Quantale q,
                                     std::vector<SpacePtr> factors)
    : id_(std::move(id)), points_(std::move(points)), distances_(std::move(distances)),
      quantale_(q), factors_(std::move(factors)) {
    if (distances_.size() != points_.size() * points_.size()) {
        throw PreconditionError("space '" + id_ + "': distance matrix has " +
                                std::to_string(distances_.size()) + " entries, expected " +
                                std::to_string(points_.size() * points_.size()));
    }
}

std::optional<std::size_t> FiniteMetricSpace::index_of(std::string_view label) const {
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (points_[i] == label) return i;
    }
    return std::nullopt;
}

bool same_space(const SpacePtr& a, const SpacePtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return *a == *b;
}

std::optional<Violation> validate_space(const FiniteMetricSpace& x) {
    const std::size_t n = x.size();
    const Quantale& q = x.quantale();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (x.label(i) == x.label(j)) {
                return Violation{"distinct-labels", {x.label(i)},
                                 "point label '" + x.label(i) + "' appears twice"};
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!q.contains(x.distance(i, j))) {
                return Violation{"range",
                                 {x.label(i), x.label(j)},
                                 "distance " + to_string(x.distance(i, j)) + " between '" +
                                     x.label(i) + "' and '" + x.label(j) +
                                     "' lies outside the carrier (above the carrier top)"};
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (x.distance(i, i) != TruthValue(0)) {
            return Violation{"reflexivity", {x.label(i)},
                             "d(" + x.label(i) + "," + x.label(i) + ") = " +
                                 to_string(x.distance(i, i)) + " is not 0"};
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (x.distance(i, j) != x.distance(j, i)) {
                return Violation{"symmetry",
                                 {x.label(i), x.label(j)},
                                 "asymmetric matrix: d" + join_labels(x, i, j) + " = " +
                                     to_string(x.distance(i, j)) + " but d" +
                                     join_labels(x, j, i) + " = " + to_string(x.distance(j, i))};
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) {
                TruthValue via = q.tensor(x.distance(i, j), x.distance(j, k));
                if (x.distance(i, k) > via) {
                    return Violation{"triangle",
                                     {x.label(i), x.label(j), x.label(k)},
                                     "triangle violation: d" + join_labels(x, i, k) + " = " +
                                         to_string(x.distance(i, k)) + " > " + to_string(via) +
                                         " = d" + join_labels(x, i, j) + " + d" +
                                         join_labels(x, j, k)};
                }
            }
        }
    }
    return std::nullopt;
}

SpacePtr make_space(std::string id, std::vector<std::string> points,
                    std::vector<TruthValue> distances, Quantale q) {
    auto space = std::make_shared<const FiniteMetricSpace>(std::move(id), std::move(points),
                                                           std::move(distances), q);
    if (auto v = validate_space(*space)) {
        throw PreconditionError("space '" + space->id() + "': " + v->message);
    }
    return space;
}

SpacePtr terminal_space(Quantale q) {
    return std::make_shared<const FiniteMetricSpace>("1", std::vector<std::string>{"*"},
                                                     std::vector<TruthValue>{TruthValue(0)}, q);
}

SpacePtr product(const SpacePtr& x, const SpacePtr& y) {
    if (x->quantale() != y->quantale()) {
        throw PreconditionError("product of spaces over different quantales");
    }
    const std::size_t nx = x->size();
    const std::size_t ny = y->size();
    std::vector<std::string> points;
    points.reserve(nx * ny);
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < ny; ++j) {
            points.push_back("(" + x->label(i) + "," + y->label(j) + ")");
        }
    }
    std::vector<TruthValue> dist(nx * ny * nx * ny);
    const std::size_t n = nx * ny;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            dist[a * n + b] = std::max(x->distance(a / ny, b / ny), y->distance(a % ny, b % ny));
        }
    }
    return std::make_shared<const FiniteMetricSpace>(x->id() + "*" + y->id(), std::move(points),
                                                     std::move(dist), x->quantale(),
                                                     std::vector<SpacePtr>{x, y});
}

SpacePtr subspace(const SpacePtr& x, const std::vector<bool>& members, std::string id) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < x->size(); ++i) {
        if (members.at(i)) keep.push_back(i);
    }
    std::vector<std::string> points;
    std::vector<TruthValue> dist;
    dist.reserve(keep.size() * keep.size());
    for (std::size_t a : keep) {
        points.push_back(x->label(a));
        for (std::size_t b : keep) dist.push_back(x->distance(a, b));
    }
    if (id.empty()) id = x->id() + "|sub";
    return std::make_shared<const FiniteMetricSpace>(std::move(id), std::move(points),
                                                     std::move(dist), x->quantale());
}

bool check_modulus(const FiniteMetricSpace& source, const FiniteMetricSpace& target,
                   std::span<const std::size_t> assignment, const Modulus& eps) {
    return check_pairs(source, eps, [&](std::size_t i, std::size_t j) {
        return target.distance(assignment[i], assignment[j]);
    });
}

bool check_modulus(const FiniteMetricSpace& source, std::span<const TruthValue> values,
                   const Modulus& eps) {
    const Quantale& q = source.quantale();
    return check_pairs(source, eps, [&](std::size_t i, std::size_t j) {
        return q.distance(values[i], values[j]);
    });
}

Modulus tightest_modulus(const FiniteMetricSpace& source, const FiniteMetricSpace& target,
                         std::span<const std::size_t> assignment) {
    return tightest(source, [&](std::size_t i, std::size_t j) {
        return target.distance(assignment[i], assignment[j]);
    });
}

Modulus tightest_modulus(const FiniteMetricSpace& source, std::span<const TruthValue> values) {
    const Quantale& q = source.quantale();
    return tightest(source, [&](std::size_t i, std::size_t j) {
        return q.distance(values[i], values[j]);
    });
}

namespace {

void check_assignment(const SpacePtr& source, const SpacePtr& target,
                      const std::vector<std::size_t>& assignment) {
    if (!source || !target) throw PreconditionError("map needs a source and a target space");
    if (assignment.size() != source->size()) {
        throw PreconditionError("map from '" + source->id() + "' must assign all " +
                                std::to_string(source->size()) + " points");
    }
    for (std::size_t v : assignment) {
        if (v >= target->size()) {
            throw PreconditionError("map into '" + target->id() + "' assigns a missing point");
        }
    }
    if (source->quantale() != target->quantale()) {
        throw PreconditionError("map between spaces over different quantales");
    }
}

} // namespace

MetricMap::MetricMap(SpacePtr source, SpacePtr target, std::vector<std::size_t> assignment)
    : source_(std::move(source)), target_(std::move(target)), assignment_(std::move(assignment)) {
    check_assignment(source_, target_, assignment_);
    modulus_ = tightest_modulus(*source_, *target_, assignment_);
}

MetricMap::MetricMap(SpacePtr source, SpacePtr target, std::vector<std::size_t> assignment,
                     Modulus modulus)
    : source_(std::move(source)), target_(std::move(target)), assignment_(std::move(assignment)),
      modulus_(std::move(modulus)) {
    check_assignment(source_, target_, assignment_);
    if (modulus_.quantale() != source_->quantale()) {
        throw PreconditionError("declared modulus is over a different quantale");
    }
    if (!check_modulus(*source_, *target_, assignment_, modulus_)) {
        throw PreconditionError("declared modulus " + to_string(modulus_) +
                                " does not hold for the map from '" + source_->id() + "' to '" +
                                target_->id() + "'");
    }
}

MetricMap identity_map(const SpacePtr& x) {
    std::vector<std::size_t> assignment(x->size());
    for (std::size_t i = 0; i < assignment.size(); ++i) assignment[i] = i;
    return MetricMap(x, x, std::move(assignment), Modulus::identity(x->quantale()));
}

MetricMap compose_maps(const MetricMap& g, const MetricMap& f) {
    if (!same_space(f.target(), g.source())) {
        throw PreconditionError("cannot compose: target '" + f.target()->id() +
                                "' differs from source '" + g.source()->id() + "'");
    }
    std::vector<std::size_t> assignment(f.source()->size());
    for (std::size_t i = 0; i < assignment.size(); ++i) assignment[i] = g(f(i));
    return MetricMap(f.source(), g.target(), std::move(assignment),
                     compose(g.modulus(), f.modulus()));
}

MetricMap pair_maps(const MetricMap& f, const MetricMap& g) {
    if (!same_space(f.source(), g.source())) {
        throw PreconditionError("cannot pair maps with sources '" + f.source()->id() + "' and '" +
                                g.source()->id() + "'");
    }
    SpacePtr target = product(f.target(), g.target());
    const std::size_t ny = g.target()->size();
    std::vector<std::size_t> assignment(f.source()->size());
    for (std::size_t i = 0; i < assignment.size(); ++i) assignment[i] = f(i) * ny + g(i);
    return MetricMap(f.source(), std::move(target), std::move(assignment),
                     combine(Combine::Max, f.modulus(), g.modulus()));
}

MetricMap projection_map(const SpacePtr& p, std::size_t factor) {
    if (p->factors().size() != 2 || factor > 1) {
        throw PreconditionError("space '" + p->id() + "' is not a binary product with factor " +
                                std::to_string(factor));
    }
    const std::size_t ny = p->factors()[1]->size();
    std::vector<std::size_t> assignment(p->size());
    for (std::size_t a = 0; a < assignment.size(); ++a) {
        assignment[a] = factor == 0 ? a / ny : a % ny;
    }
    return MetricMap(p, p->factors()[factor], std::move(assignment),
                     Modulus::identity(p->quantale()));
}

std::optional<std::size_t> projected_factor(const MetricMap& m) {
    const SpacePtr& p = m.source();
    if (p->factors().size() != 2) return std::nullopt;
    for (std::size_t k = 0; k < 2; ++k) {
        if (!same_space(p->factors()[k], m.target())) continue;
        auto expected = projection_map(p, k);
        if (std::equal(expected.assignment().begin(), expected.assignment().end(),
                       m.assignment().begin(), m.assignment().end())) {
            return k;
        }
    }
    return std::nullopt;
}

bool is_regular_mono(const MetricMap& m, Moduloid e) {
    const FiniteMetricSpace& x = *m.source();
    const FiniteMetricSpace& y = *m.target();
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            if (m(i) == m(j)) return false;
            const TruthValue& before = x.distance(i, j);
            const TruthValue& after = y.distance(m(i), m(j));
            if (e == Moduloid::E1) {
                if (before != after) return false;
            } else if (after == TruthValue(0) && before != TruthValue(0)) {
                return false;
            }
        }
    }
    return true;
}

} // namespace contsem
