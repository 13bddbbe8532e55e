#pragma once

#include "contsem/dsl.hpp"
#include "contsem/random.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace contsem::laws {

struct Witness {
    std::string law;
    std::string detail;
};

struct LawTally {
    std::size_t checks = 0;
    std::size_t failures = 0;
};

/// Pass/fail counts per law, keeping the first few failures of each.
class Report {
public:
    explicit Report(std::string suite) : suite_(std::move(suite)) {}

    bool check(const std::string& law, bool ok, const std::function<std::string()>& detail);

    const std::string& suite() const noexcept { return suite_; }
    const std::map<std::string, LawTally>& laws() const noexcept { return laws_; }
    const std::vector<Witness>& witnesses() const noexcept { return witnesses_; }
    std::size_t checks() const;
    std::size_t failures() const;
    bool passed() const { return failures() == 0; }

    void merge(const Report& other);

private:
    std::string suite_;
    std::map<std::string, LawTally> laws_;
    std::vector<Witness> witnesses_;
};

/// Seed, largest space size and number of random instances. A size or count
/// of 0 selects the suite's default.
struct Params {
    std::uint64_t seed = 1;
    std::size_t size = 0;
    std::size_t count = 0;
};

/// to_predicate/to_family round trips and naturality of the classifier.
Report classifier_suite(const Params& p);
/// Exhaustive envelope adjunction at grid 1/4 on 3-point spaces, and the
/// Dijkstra envelope against a Bellman-Ford fixpoint on spaces up to 30 points.
Report envelope_suite(const Params& p);
/// Direct inf/sup against the adjoints, and both adjunctions exhaustively
/// at 2 x 2 points and grid 1/4.
Report quantifier_suite(const Params& p);
/// Adjunction chain, Frobenius and Heyting laws over every map and subset of
/// spaces up to `size` points.
Report frobenius_suite(const Params& p);
/// Beck-Chevalley on constructed pullback squares, exhaustively.
Report beck_chevalley_suite(const Params& p);
/// The five clauses of the distance family on random spaces and products.
Report metrization_suite(const Params& p);
/// Distance and pair-distance predicates at their stated moduli.
Report distance_suite(const Params& p);
/// Classifier round trip and uniqueness for presheaves, and the metric on
/// truth values.
Report presheaf_suite(const Params& p);
/// Modulus soundness and quantifier agreement on random formulas.
Report dsl_suite(const Params& p);

/// Every suite name accepted by run_suite, in a fixed order.
const std::vector<std::string>& suite_names();

/// Throws PreconditionError on an unknown name.
Report run_suite(std::string_view name, const Params& p);

// Random formula generation, shared with the tests.

/// Spaces X and Y, constants cX and cY, maps g: X -> Y, h: Y -> X,
/// k: X -> X, predicates P on X, Q on Y and R on X*Y.
dsl::Signature random_signature(gen::Rng& rng, std::size_t size);

/// A well-typed formula of depth at most `depth` under env.
dsl::Formula random_formula(gen::Rng& rng, const dsl::Signature& sig, const dsl::Env& env,
                            std::size_t depth);

/// A random subset of {x:X, y:Y}.
dsl::Env random_env(gen::Rng& rng, const dsl::Signature& sig);

} // namespace contsem::laws
