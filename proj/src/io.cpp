#include "contsem/io.hpp"

#include "contsem/error.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

namespace contsem::io {

namespace {

[[noreturn]] void schema(const std::string& what) { throw ParseError("schema violation: " + what); }

const Json& field(const Json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) schema(where + " must be an object");
    auto it = obj.find(key);
    if (it == obj.end()) schema("missing key '" + std::string(key) + "' in " + where);
    return *it;
}

std::string string_of(const Json& j, const std::string& where) {
    if (!j.is_string()) schema(where + " must be a string");
    return j.get<std::string>();
}

Rational rational_from_json(const Json& j, const std::string& where) {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_string()) return parse_rational(j.get<std::string>());
    schema(where + " must be a rational string or an integer");
}

std::size_t point_of(const SpacePtr& s, const std::string& label, const std::string& where) {
    auto i = s->index_of(label);
    if (!i) schema("unknown point '" + label + "' of space '" + s->id() + "' in " + where);
    return *i;
}

/// Values per point, as an object keyed by label or an array in point order.
template <class T, class F>
std::vector<T> per_point(const Json& j, const SpacePtr& s, const std::string& where, F convert) {
    std::vector<T> out(s->size());
    if (j.is_array()) {
        if (j.size() != s->size()) schema(where + " must have one entry per point of '" + s->id() + "'");
        for (std::size_t i = 0; i < s->size(); ++i) out[i] = convert(j[i]);
        return out;
    }
    if (!j.is_object()) schema(where + " must be an object keyed by point");
    std::vector<bool> seen(s->size());
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::size_t i = point_of(s, it.key(), where);
        out[i] = convert(it.value());
        seen[i] = true;
    }
    for (std::size_t i = 0; i < s->size(); ++i) {
        if (!seen[i]) schema(where + " has no entry for point '" + s->label(i) + "'");
    }
    return out;
}

std::vector<std::size_t> assignment_from_json(const Json& j, const SpacePtr& src, const SpacePtr& tgt,
                                              const std::string& where) {
    return per_point<std::size_t>(j, src, where, [&](const Json& v) {
        return point_of(tgt, string_of(v, where), where);
    });
}

Json assignment_json(const FiniteMetricSpace& src, const FiniteMetricSpace& tgt,
                     std::span<const std::size_t> a) {
    Json out = Json::object();
    for (std::size_t x = 0; x < a.size(); ++x) out[src.label(x)] = tgt.label(a[x]);
    return out;
}

Json values_json(const FiniteMetricSpace& s, std::span<const TruthValue> vs) {
    Json out = Json::object();
    for (std::size_t x = 0; x < vs.size(); ++x) out[s.label(x)] = to_json(vs[x]);
    return out;
}

template <class V>
const V& find_named(const std::vector<std::pair<std::string, V>>& items, std::string_view name,
                    const char* kind) {
    for (const auto& [n, v] : items) {
        if (n == name) return v;
    }
    throw PreconditionError(std::string("unknown ") + kind + " '" + std::string(name) + "'");
}

} // namespace

Quantale quantale_from_env() {
    const char* v = std::getenv("CONTSEM_MODE");
    if (v == nullptr || *v == '\0') return Quantale{};
    return Quantale(parse_mode(v));
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileNotFoundError("file not found: " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("malformed JSON in " + path + ": " + e.what());
    }
}

// ---- leaves ------------------------------------------------------------------

Json to_json(const TruthValue& t) { return to_string(t); }

TruthValue truth_from_json(const Json& j, const Quantale& q) {
    TruthValue t;
    if (j.is_number_integer()) {
        t = TruthValue(Rational(j.get<long long>()));
    } else if (j.is_string()) {
        t = parse_truth(j.get<std::string>());
    } else {
        schema("truth values must be rational strings or integers");
    }
    if (!q.contains(t)) {
        throw PreconditionError("value " + to_string(t) + " lies outside the carrier of " +
                                to_string(q.mode()));
    }
    return t;
}

Json to_json(const Modulus& m) {
    Json out = Json::array();
    for (const Piece& p : m.pieces()) {
        Json rec = Json::object();
        rec["breakpoint"] = to_string(p.breakpoint);
        rec["intercept"] = to_json(p.intercept);
        rec["slope"] = to_string(p.slope);
        out.push_back(std::move(rec));
    }
    return out;
}

Modulus modulus_from_json(const Json& j, const Quantale& q) {
    if (j.is_string()) return parse_modulus_spec(j.get<std::string>(), q);
    if (!j.is_array()) schema("a modulus must be an array of pieces or a text form");
    std::vector<Piece> pieces;
    for (const Json& rec : j) {
        pieces.push_back(Piece{rational_from_json(field(rec, "breakpoint", "modulus piece"), "breakpoint"),
                               truth_from_json(field(rec, "intercept", "modulus piece"), Quantale(Mode::ExtendedNonneg)),
                               rational_from_json(field(rec, "slope", "modulus piece"), "slope")});
    }
    return Modulus::from_pieces(std::move(pieces), q);
}

Json to_json(const Subobject& s) { return Json(s.labels()); }

Subobject subobject_from_json(const Json& j, const SpacePtr& space) {
    if (!j.is_array()) schema("a subobject must be an array of point labels");
    std::vector<std::string> labels;
    for (const Json& l : j) labels.push_back(string_of(l, "subobject member"));
    return Subobject::of(space, labels);
}

// ---- spaces, maps, predicates --------------------------------------------------

Json to_json(const FiniteMetricSpace& s) {
    Json out = Json::object();
    out["id"] = s.id();
    out["points"] = Json(std::vector<std::string>(s.labels().begin(), s.labels().end()));
    Json dist = Json::array();
    for (std::size_t i = 0; i < s.size(); ++i) {
        Json row = Json::array();
        for (std::size_t k = 0; k < s.size(); ++k) row.push_back(to_json(s.distance(i, k)));
        dist.push_back(std::move(row));
    }
    out["dist"] = std::move(dist);
    return out;
}

SpacePtr space_from_json(const Json& j, const Quantale& q, std::string default_id) {
    std::string id = j.is_object() && j.contains("id") ? string_of(j["id"], "space id") : std::move(default_id);
    if (id.empty()) schema("space without an id");
    const std::string where = "space '" + id + "'";
    const Json& pts = field(j, "points", where);
    if (!pts.is_array()) schema("points of " + where + " must be an array");
    std::vector<std::string> points;
    std::set<std::string> seen;
    for (const Json& p : pts) {
        points.push_back(string_of(p, "point label"));
        if (!seen.insert(points.back()).second) schema("duplicate point '" + points.back() + "' in " + where);
    }
    const Json& dist = field(j, "dist", where);
    if (!dist.is_array() || dist.size() != points.size()) {
        schema("dist of " + where + " must be a " + std::to_string(points.size()) + " x " +
               std::to_string(points.size()) + " matrix");
    }
    std::vector<TruthValue> d;
    for (const Json& row : dist) {
        if (!row.is_array() || row.size() != points.size()) {
            schema("dist of " + where + " must be a " + std::to_string(points.size()) + " x " +
                   std::to_string(points.size()) + " matrix");
        }
        for (const Json& v : row) {
            if (v.is_number_integer()) {
                d.emplace_back(Rational(v.get<long long>()));
            } else if (v.is_string()) {
                d.push_back(parse_truth(v.get<std::string>()));
            } else {
                schema("distances in " + where + " must be rational strings");
            }
        }
    }
    return make_space(std::move(id), std::move(points), std::move(d), q);
}

Json to_json(const MetricMap& m, const std::string& id) {
    Json out = Json::object();
    out["id"] = id;
    out["source"] = m.source()->id();
    out["target"] = m.target()->id();
    out["assignment"] = assignment_json(*m.source(), *m.target(), m.assignment());
    out["modulus"] = to_json(m.modulus());
    return out;
}

Json to_json(const Predicate& p) {
    Json out = Json::object();
    out["space"] = p.space()->id();
    out["values"] = values_json(*p.space(), p.values());
    out["modulus"] = to_json(p.modulus());
    return out;
}

Json to_json(const IndexedFamily& r) {
    Json out = Json::object();
    out["space"] = r.space()->id();
    out["values"] = values_json(*r.space(), r.thresholds());
    Json att = Json::object();
    for (std::size_t x = 0; x < r.space()->size(); ++x) att[r.space()->label(x)] = r.attained(x);
    out["attained"] = std::move(att);
    return out;
}

// ---- structure files -------------------------------------------------------------

SpacePtr Structure::space(std::string_view name) const {
    auto star = name.find('*');
    if (star != std::string_view::npos) {
        return product(space(name.substr(0, star)), space(name.substr(star + 1)));
    }
    for (const SpacePtr& s : spaces) {
        if (s->id() == name) return s;
    }
    throw PreconditionError("unknown space '" + std::string(name) + "'");
}

const MetricMap& Structure::map(std::string_view name) const { return find_named(maps, name, "map"); }
const Predicate& Structure::predicate(std::string_view name) const {
    return find_named(predicates, name, "predicate");
}
const IndexedFamily& Structure::family(std::string_view name) const {
    return find_named(families, name, "family");
}

dsl::Signature Structure::signature() const {
    dsl::Signature sig;
    for (const SpacePtr& s : spaces) sig.spaces.emplace(s->id(), s);
    for (const auto& [n, c] : constants) sig.constants.emplace(n, c);
    for (const auto& [n, m] : maps) sig.maps.emplace(n, m);
    for (const auto& [n, p] : predicates) sig.predicates.emplace(n, p);
    sig.moduloid = moduloid;
    return sig;
}

Structure load_structure(const Json& j, Quantale q) {
    if (!j.is_object()) schema("a structure file must be a JSON object");
    Structure s;
    if (j.contains("mode")) q = Quantale(parse_mode(string_of(j["mode"], "mode")));
    s.quantale = q;
    if (j.contains("moduloid")) s.moduloid = parse_moduloid(string_of(j["moduloid"], "moduloid"));

    const Json& spaces = field(j, "spaces", "structure file");
    if (!spaces.is_array()) schema("spaces must be an array");
    std::set<std::string> ids;
    for (const Json& sj : spaces) {
        s.spaces.push_back(space_from_json(sj, q));
        if (!ids.insert(s.spaces.back()->id()).second) schema("duplicate space '" + s.spaces.back()->id() + "'");
    }
    auto lookup = [&](const Json& name, const std::string& where) {
        try {
            return s.space(string_of(name, where));
        } catch (const PreconditionError& e) {
            schema(std::string(e.what()) + " in " + where);
        }
    };

    std::set<std::string> names;
    auto fresh = [&](const std::string& n) {
        if (!names.insert(n).second) schema("duplicate name '" + n + "'");
    };

    if (j.contains("maps")) {
        if (!j["maps"].is_array()) schema("maps must be an array");
        for (const Json& mj : j["maps"]) {
            std::string id = string_of(field(mj, "id", "map"), "map id");
            fresh(id);
            const std::string where = "map '" + id + "'";
            SpacePtr src = lookup(field(mj, "source", where), where);
            SpacePtr tgt = lookup(field(mj, "target", where), where);
            auto a = assignment_from_json(field(mj, "assignment", where), src, tgt, where);
            if (mj.contains("modulus")) {
                s.maps.emplace_back(id, MetricMap(src, tgt, std::move(a), modulus_from_json(mj["modulus"], q)));
            } else {
                s.maps.emplace_back(id, MetricMap(src, tgt, std::move(a)));
            }
        }
    }

    if (j.contains("constants")) {
        const Json& cs = j["constants"];
        if (!cs.is_object()) schema("constants must be an object");
        for (auto it = cs.begin(); it != cs.end(); ++it) {
            fresh(it.key());
            const std::string where = "constant '" + it.key() + "'";
            SpacePtr sp = lookup(field(it.value(), "space", where), where);
            s.constants.emplace_back(it.key(),
                                     std::make_pair(sp, point_of(sp, string_of(field(it.value(), "point", where), where), where)));
        }
    }

    auto values_of = [&](const Json& pj, const SpacePtr& sp, const std::string& where) {
        return per_point<TruthValue>(field(pj, "values", where), sp, "values of " + where,
                                     [&](const Json& v) { return truth_from_json(v, q); });
    };

    if (j.contains("predicates")) {
        const Json& ps = j["predicates"];
        if (!ps.is_object()) schema("predicates must be an object");
        for (auto it = ps.begin(); it != ps.end(); ++it) {
            fresh(it.key());
            const std::string where = "predicate '" + it.key() + "'";
            SpacePtr sp = lookup(field(it.value(), "space", where), where);
            auto vals = values_of(it.value(), sp, where);
            Modulus eps = it.value().contains("modulus") ? modulus_from_json(it.value()["modulus"], q)
                                                         : tightest_modulus(*sp, vals);
            s.predicates.emplace_back(it.key(), Predicate(sp, std::move(vals), std::move(eps)));
        }
    }

    if (j.contains("families")) {
        const Json& fs = j["families"];
        if (!fs.is_object()) schema("families must be an object");
        for (auto it = fs.begin(); it != fs.end(); ++it) {
            fresh(it.key());
            const std::string where = "family '" + it.key() + "'";
            SpacePtr sp = lookup(field(it.value(), "space", where), where);
            auto vals = values_of(it.value(), sp, where);
            std::vector<bool> att(sp->size(), true);
            if (it.value().contains("attained")) {
                auto a = per_point<char>(it.value()["attained"], sp, "attained of " + where, [&](const Json& v) {
                    if (!v.is_boolean()) schema("attained flags of " + where + " must be booleans");
                    return static_cast<char>(v.get<bool>());
                });
                for (std::size_t i = 0; i < att.size(); ++i) att[i] = a[i] != 0;
            }
            s.families.emplace_back(it.key(), IndexedFamily(sp, std::move(vals), std::move(att)));
        }
    }
    return s;
}

Json to_json(const Structure& s) {
    Json out = Json::object();
    out["mode"] = to_string(s.quantale.mode());
    out["moduloid"] = to_string(s.moduloid);
    Json spaces = Json::array();
    for (const SpacePtr& sp : s.spaces) spaces.push_back(to_json(*sp));
    out["spaces"] = std::move(spaces);
    Json maps = Json::array();
    for (const auto& [n, m] : s.maps) maps.push_back(to_json(m, n));
    out["maps"] = std::move(maps);
    Json cs = Json::object();
    for (const auto& [n, c] : s.constants) {
        cs[n] = Json{{"space", c.first->id()}, {"point", c.first->label(c.second)}};
    }
    out["constants"] = std::move(cs);
    Json ps = Json::object();
    for (const auto& [n, p] : s.predicates) ps[n] = to_json(p);
    out["predicates"] = std::move(ps);
    Json fs = Json::object();
    for (const auto& [n, r] : s.families) fs[n] = to_json(r);
    out["families"] = std::move(fs);
    return out;
}

// ---- presheaf files --------------------------------------------------------------

PresheafPredicate PresheafFile::predicate(std::string_view name) const {
    return PresheafPredicate(presheaf, find_named(predicates, name, "predicate"));
}

PresheafFile load_presheaf(const Json& j, Quantale q) {
    if (!j.is_object()) schema("a presheaf file must be a JSON object");
    if (j.contains("mode")) q = Quantale(parse_mode(string_of(j["mode"], "mode")));
    const Json& cj = field(j, "category", "presheaf file");
    const Json& objs = field(cj, "objects", "category");
    if (!objs.is_array() || objs.empty()) schema("objects must be a nonempty array");
    std::vector<std::string> objects;
    for (const Json& o : objs) objects.push_back(string_of(o, "object"));
    std::vector<MorphismDecl> morphisms;
    if (cj.contains("morphisms")) {
        for (const Json& mj : cj["morphisms"]) {
            morphisms.push_back({string_of(field(mj, "id", "morphism"), "morphism id"),
                                 string_of(field(mj, "source", "morphism"), "morphism source"),
                                 string_of(field(mj, "target", "morphism"), "morphism target")});
        }
    }
    std::vector<CompositeDecl> composition;
    if (cj.contains("composition")) {
        for (const Json& e : cj["composition"]) {
            if (!e.is_array() || e.size() != 3) schema("composition entries must be [g, f, gf]");
            composition.push_back({string_of(e[0], "composite"), string_of(e[1], "composite"),
                                   string_of(e[2], "composite")});
        }
    }
    CategoryPtr c = make_category(std::move(objects), std::move(morphisms), std::move(composition));

    const Json& sj = field(j, "spaces", "presheaf file");
    std::vector<SpacePtr> spaces;
    for (std::size_t a = 0; a < c->object_count(); ++a) {
        spaces.push_back(space_from_json(field(sj, c->object(a).c_str(), "spaces"), q, c->object(a)));
    }

    std::vector<std::vector<std::size_t>> restrictions(c->morphism_count());
    const Json empty = Json::object();
    const Json& rj = j.contains("restrictions") ? j["restrictions"] : empty;
    if (!rj.is_object()) schema("restrictions must be an object");
    for (auto it = rj.begin(); it != rj.end(); ++it) {
        if (!c->morphism_index(it.key())) schema("restriction for unknown morphism '" + it.key() + "'");
    }
    for (std::size_t m = 0; m < c->morphism_count(); ++m) {
        const Arrow& ar = c->arrow(m);
        auto it = rj.find(ar.id);
        if (it == rj.end()) {
            if (!c->is_identity(m)) schema("missing restriction for morphism '" + ar.id + "'");
            continue;
        }
        const std::string where = "restriction '" + ar.id + "'";
        restrictions[m] = assignment_from_json(*it, spaces[ar.target], spaces[ar.source], where);
    }

    PresheafFile out;
    out.presheaf = std::make_shared<const MetricPresheaf>(c, spaces, std::move(restrictions));

    if (j.contains("predicates")) {
        const Json& ps = j["predicates"];
        if (!ps.is_object()) schema("predicates must be an object");
        for (auto it = ps.begin(); it != ps.end(); ++it) {
            const std::string where = "predicate '" + it.key() + "'";
            std::vector<std::vector<TruthValue>> values;
            for (std::size_t a = 0; a < c->object_count(); ++a) {
                values.push_back(per_point<TruthValue>(field(it.value(), c->object(a).c_str(), where), spaces[a],
                                                       where + " at '" + c->object(a) + "'",
                                                       [&](const Json& v) { return truth_from_json(v, q); }));
            }
            out.predicates.emplace_back(it.key(), std::move(values));
        }
    }
    return out;
}

Json to_json(const PresheafFile& f) {
    const FinCategory& c = *f.presheaf->category();
    Json out = Json::object();
    out["mode"] = to_string(f.presheaf->quantale().mode());
    Json cat = Json::object();
    cat["objects"] = Json(c.objects());
    Json ms = Json::array();
    for (std::size_t m = 0; m < c.morphism_count(); ++m) {
        if (c.is_identity(m)) continue;
        const Arrow& a = c.arrow(m);
        ms.push_back(Json{{"id", a.id}, {"source", c.object(a.source)}, {"target", c.object(a.target)}});
    }
    cat["morphisms"] = std::move(ms);
    Json comp = Json::array();
    for (std::size_t g = 0; g < c.morphism_count(); ++g) {
        for (std::size_t h = 0; h < c.morphism_count(); ++h) {
            if (c.is_identity(g) || c.is_identity(h)) continue;
            if (auto gh = c.compose(g, h)) comp.push_back(Json{c.arrow(g).id, c.arrow(h).id, c.arrow(*gh).id});
        }
    }
    cat["composition"] = std::move(comp);
    out["category"] = std::move(cat);

    Json spaces = Json::object();
    for (std::size_t a = 0; a < c.object_count(); ++a) spaces[c.object(a)] = to_json(*f.presheaf->at(a));
    out["spaces"] = std::move(spaces);
    Json rs = Json::object();
    for (std::size_t m = 0; m < c.morphism_count(); ++m) {
        if (c.is_identity(m)) continue;
        const Arrow& a = c.arrow(m);
        rs[a.id] = assignment_json(*f.presheaf->at(a.target), *f.presheaf->at(a.source), f.presheaf->restriction(m));
    }
    out["restrictions"] = std::move(rs);
    Json ps = Json::object();
    for (const auto& [n, vals] : f.predicates) {
        Json pj = Json::object();
        for (std::size_t a = 0; a < c.object_count(); ++a) pj[c.object(a)] = values_json(*f.presheaf->at(a), vals[a]);
        ps[n] = std::move(pj);
    }
    out["predicates"] = std::move(ps);
    return out;
}

Json to_json(const OmegaElement& s) {
    const FinCategory& c = *s.category;
    Json theta = Json::object();
    const auto& into = c.morphisms_into(s.object);
    for (std::size_t k = 0; k < into.size(); ++k) theta[c.arrow(into[k]).id] = to_json(s.theta[k]);
    return Json{{"object", c.object(s.object)}, {"theta", std::move(theta)}};
}

} // namespace contsem::io
