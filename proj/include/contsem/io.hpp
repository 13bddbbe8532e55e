#pragma once

#include "contsem/dsl.hpp"
#include "contsem/error.hpp"
#include "contsem/predicate.hpp"
#include "contsem/presheaf.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace contsem::io {

using Json = nlohmann::ordered_json;

/// CONTSEM_MODE, defaulting to unit-interval. Throws ParseError on any other
/// value.
Quantale quantale_from_env();

class FileNotFoundError : public Error {
public:
    using Error::Error;
};

/// Reads and parses a JSON file. Throws FileNotFoundError, or ParseError on
/// malformed JSON.
Json read_json_file(const std::string& path);

// Leaf values.
Json to_json(const TruthValue& t);
TruthValue truth_from_json(const Json& j, const Quantale& q);
/// An ordered array of {breakpoint, intercept, slope} records.
Json to_json(const Modulus& m);
/// Accepts the record array, or a short text form such as "lip:2".
Modulus modulus_from_json(const Json& j, const Quantale& q);
/// Sorted point labels.
Json to_json(const Subobject& s);
Subobject subobject_from_json(const Json& j, const SpacePtr& space);

Json to_json(const FiniteMetricSpace& s);
/// Builds and validates; distances are rational strings (integers allowed).
SpacePtr space_from_json(const Json& j, const Quantale& q, std::string default_id = {});

Json to_json(const MetricMap& m, const std::string& id);
Json to_json(const Predicate& p);
Json to_json(const IndexedFamily& r);

/// A structure file: spaces, maps, point constants, predicates and
/// families, plus optional "mode" and "moduloid" keys.
struct Structure {
    Quantale quantale;
    Moduloid moduloid = Moduloid::EuPL;
    std::vector<SpacePtr> spaces;
    std::vector<std::pair<std::string, MetricMap>> maps;
    std::vector<std::pair<std::string, std::pair<SpacePtr, std::size_t>>> constants;
    std::vector<std::pair<std::string, Predicate>> predicates;
    std::vector<std::pair<std::string, IndexedFamily>> families;

    /// A declared space, or a right-nested product written "X*Y*Z".
    SpacePtr space(std::string_view name) const;
    const MetricMap& map(std::string_view name) const;
    const Predicate& predicate(std::string_view name) const;
    const IndexedFamily& family(std::string_view name) const;

    dsl::Signature signature() const;
};

/// Throws ParseError on schema violations and PreconditionError (from the
/// core) when data fails its axioms.
Structure load_structure(const Json& j, Quantale q);
Json to_json(const Structure& s);

/// A presheaf file. Predicates are kept as raw values so that invalid ones
/// can be reported rather than rejected at load time.
struct PresheafFile {
    PresheafPtr presheaf;
    std::vector<std::pair<std::string, std::vector<std::vector<TruthValue>>>> predicates;

    /// Throws when the name is unknown or the values are not a predicate.
    PresheafPredicate predicate(std::string_view name) const;
};

/// The category is validated and component spaces are checked; the presheaf
/// itself is not, so validate_presheaf can report on it.
PresheafFile load_presheaf(const Json& j, Quantale q);
Json to_json(const PresheafFile& f);

Json to_json(const OmegaElement& s);

} // namespace contsem::io
