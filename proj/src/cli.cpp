#include "contsem/cli.hpp"

#include "contsem/error.hpp"
#include "contsem/io.hpp"
#include "contsem/laws.hpp"
#include "contsem/quantifier.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>

namespace contsem::cli {

namespace {

using io::Json;

/// A usage problem discovered after argument parsing.
class UsageError : public Error {
public:
    using Error::Error;
};

struct Outcome {
    Json outputs = Json::object();
    std::string pretty;
    bool ok = true;
};

/// FNV-1a over the file bytes; identifies the input in reports.
std::string digest_of(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io::FileNotFoundError("file not found: " + path);
    std::uint64_t h = 1469598103934665603ULL;
    for (std::istreambuf_iterator<char> it(in), end; it != end; ++it) {
        h ^= static_cast<unsigned char>(*it);
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << "fnv1a64:" << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

Json violation_json(const Violation& v) {
    return Json{{"axiom", v.axiom}, {"witnesses", v.witnesses}, {"message", v.message}};
}

std::string values_table(const Predicate& p) {
    std::ostringstream os;
    for (std::size_t x = 0; x < p.space()->size(); ++x) {
        os << p.space()->label(x) << "\t" << to_string(p.value(x)) << "\n";
    }
    os << "modulus\t" << to_string(p.modulus()) << "\n";
    return os.str();
}

io::Structure load_structure_file(const std::string& path) {
    return io::load_structure(io::read_json_file(path), io::quantale_from_env());
}

// ---- commands ------------------------------------------------------------------

Outcome cmd_validate(const std::string& path) {
    Outcome o;
    Json j = io::read_json_file(path);
    if (j.is_object() && j.contains("category")) {
        io::PresheafFile f = io::load_presheaf(j, io::quantale_from_env());
        Json vs = Json::array();
        if (auto v = validate_presheaf(*f.presheaf)) vs.push_back(violation_json(*v));
        for (const auto& [name, vals] : f.predicates) {
            if (auto v = presheaf_predicate_violation(*f.presheaf, vals)) {
                Json vj = violation_json(*v);
                vj["predicate"] = name;
                vs.push_back(std::move(vj));
            }
        }
        o.ok = vs.empty();
        o.outputs["kind"] = "presheaf";
        o.outputs["valid"] = o.ok;
        o.outputs["objects"] = f.presheaf->category()->object_count();
        o.outputs["morphisms"] = f.presheaf->category()->morphism_count();
        o.outputs["predicates"] = f.predicates.size();
        o.outputs["violations"] = vs;
        o.pretty = o.ok ? "valid presheaf\n" : "invalid presheaf\n";
        for (const auto& v : vs) o.pretty += "  " + v["axiom"].get<std::string>() + ": " + v["message"].get<std::string>() + "\n";
        return o;
    }
    io::Structure s = io::load_structure(j, io::quantale_from_env());
    o.outputs["kind"] = "structure";
    o.outputs["valid"] = true;
    o.outputs["mode"] = to_string(s.quantale.mode());
    o.outputs["spaces"] = s.spaces.size();
    o.outputs["maps"] = s.maps.size();
    o.outputs["constants"] = s.constants.size();
    o.outputs["predicates"] = s.predicates.size();
    o.outputs["families"] = s.families.size();
    o.pretty = "valid structure: " + std::to_string(s.spaces.size()) + " spaces, " + std::to_string(s.maps.size()) +
               " maps, " + std::to_string(s.predicates.size()) + " predicates, " +
               std::to_string(s.families.size()) + " families\n";
    return o;
}

/// --env entries: v=point, v=Space:point (bind v to a point) or v:Space
/// (leave v free over Space).
Outcome cmd_eval(const std::string& path, const std::string& text, const std::vector<std::string>& envs) {
    io::Structure s = load_structure_file(path);
    dsl::Signature sig = s.signature();
    dsl::Env env;
    for (const std::string& e : envs) {
        auto eq = e.find('=');
        if (eq == std::string::npos) {
            auto colon = e.find(':');
            if (colon == std::string::npos || colon == 0) throw UsageError("bad --env entry '" + e + "'");
            env.emplace_back(e.substr(0, colon), s.space(e.substr(colon + 1)));
            continue;
        }
        std::string var = e.substr(0, eq);
        std::string rhs = e.substr(eq + 1);
        if (var.empty() || rhs.empty()) throw UsageError("bad --env entry '" + e + "'");
        auto colon = rhs.find(':');
        if (colon != std::string::npos) {
            SpacePtr sp = s.space(rhs.substr(0, colon));
            auto idx = sp->index_of(rhs.substr(colon + 1));
            if (!idx) throw PreconditionError("unknown point '" + rhs.substr(colon + 1) + "' of space '" + sp->id() + "'");
            sig.constants[var] = {sp, *idx};
            continue;
        }
        std::vector<std::pair<SpacePtr, std::size_t>> hits;
        for (const SpacePtr& sp : s.spaces) {
            if (auto idx = sp->index_of(rhs)) hits.emplace_back(sp, *idx);
        }
        if (hits.size() != 1) {
            throw PreconditionError("point '" + rhs + "' is " + (hits.empty() ? "in no space" : "ambiguous") +
                                    "; write " + var + "=Space:" + rhs);
        }
        sig.constants[var] = hits.front();
    }

    dsl::Formula f = dsl::parse(text);
    Predicate p = dsl::evaluate(f, sig, env);
    Outcome o;
    o.outputs["formula"] = dsl::to_string(f);
    if (env.empty()) {
        o.outputs["value"] = io::to_json(p.value(0));
        o.pretty = to_string(p.value(0)) + "\n";
    } else {
        Json vars = Json::array();
        for (const auto& [v, sp] : env) vars.push_back(Json{{"variable", v}, {"space", sp->id()}});
        o.outputs["variables"] = std::move(vars);
        o.outputs["predicate"] = io::to_json(p);
        o.pretty = values_table(p);
    }
    o.outputs["modulus"] = to_string(p.modulus());
    o.outputs["moduloid"] = to_string(sig.moduloid);
    return o;
}

Outcome cmd_envelope(const std::string& path, const std::string& family, const std::string& spec) {
    io::Structure s = load_structure_file(path);
    IndexedFamily r = [&] {
        for (const auto& [n, fam] : s.families) {
            if (n == family) return fam;
        }
        for (const auto& [n, pr] : s.predicates) {
            if (n == family) return to_family(pr);
        }
        throw PreconditionError("unknown family '" + family + "'");
    }();
    Modulus eps = parse_modulus_spec(spec, s.quantale);
    Predicate env = envelope(r, eps);
    Outcome o;
    o.outputs["family"] = family;
    o.outputs["modulus_spec"] = to_string(eps);
    o.outputs["envelope"] = io::to_json(env);
    o.outputs["was_predicate"] = is_epsilon_predicate(r, eps);
    o.pretty = values_table(env);
    return o;
}

Outcome cmd_quantify(const std::string& path, const std::string& kind, const std::string& over,
                     const std::string& name) {
    io::Structure s = load_structure_file(path);
    const Predicate& r = s.predicate(name);
    SpacePtr y = s.space(over);
    const SpacePtr& yx = r.space();
    if (yx->factors().size() != 2 || !same_space(yx->factors()[0], y)) {
        throw PreconditionError("predicate '" + name + "' lives on '" + yx->id() + "', not on a product " + y->id() +
                                "*X");
    }
    MetricMap pi = projection_map(yx, 1);
    const bool inf = kind == "inf";
    Predicate direct = quantify_direct(inf ? Quantifier::Inf : Quantifier::Sup, pi, r);
    Predicate adjoint = inf ? exists_along(pi, r) : forall_proj(pi, r);
    Outcome o;
    o.outputs["kind"] = kind;
    o.outputs["over"] = y->id();
    o.outputs["result"] = io::to_json(direct);
    o.outputs["adjoint_agrees"] = direct == adjoint;
    o.ok = direct == adjoint;
    o.pretty = values_table(direct);
    return o;
}

Outcome cmd_classify(const std::string& path, const std::string& name, std::size_t grid) {
    io::Structure s = load_structure_file(path);
    const Predicate& p = s.predicate(name);
    const std::size_t n = grid == 0 ? least_compatible_grid(p) : grid;
    SpacePtr g = make_grid(n, s.quantale);
    MetricMap f = classifying_map(p, g, n);
    Outcome o;
    o.outputs["predicate"] = name;
    o.outputs["grid"] = n;
    Json m = Json::object();
    for (std::size_t x = 0; x < f.assignment().size(); ++x) {
        m[p.space()->label(x)] = g->label(f(x));
        o.pretty += p.space()->label(x) + "\t-> " + g->label(f(x)) + "\n";
    }
    o.outputs["map"] = std::move(m);
    o.outputs["modulus"] = io::to_json(f.modulus());
    o.outputs["pulls_back_truth"] =
        std::equal(p.values().begin(), p.values().end(), predicate_pullback(f, truth_predicate(g)).values().begin());
    return o;
}

Outcome cmd_presheaf_check(const std::string& path) {
    Json j = io::read_json_file(path);
    if (!j.is_object() || !j.contains("category")) throw ParseError("schema violation: not a presheaf file");
    return cmd_validate(path);
}

Outcome cmd_presheaf_classify(const std::string& path, const std::string& name) {
    io::PresheafFile f = io::load_presheaf(io::read_json_file(path), io::quantale_from_env());
    if (auto v = validate_presheaf(*f.presheaf)) throw PreconditionError(v->message);
    PresheafPredicate r = f.predicate(name);
    Classification phi = classify_presheaf(r);
    const FinCategory& c = *f.presheaf->category();
    Outcome o;
    o.outputs["predicate"] = name;
    Json cls = Json::object();
    for (std::size_t a = 0; a < c.object_count(); ++a) {
        Json row = Json::object();
        const SpacePtr& sp = f.presheaf->at(a);
        for (std::size_t x = 0; x < sp->size(); ++x) {
            Json el = io::to_json(phi[a][x]);
            row[sp->label(x)] = el["theta"];
            o.pretty += c.object(a) + "\t" + sp->label(x) + "\t";
            for (auto it = el["theta"].begin(); it != el["theta"].end(); ++it) {
                o.pretty += it.key() + "=" + it.value().get<std::string>() + " ";
            }
            o.pretty += "\n";
        }
        cls[c.object(a)] = std::move(row);
    }
    o.outputs["classification"] = std::move(cls);
    const bool natural = !validate_classification(*f.presheaf, phi);
    const bool round_trip = natural && pullback_truth(f.presheaf, phi) == r;
    o.outputs["natural"] = natural;
    o.outputs["round_trip"] = round_trip;
    o.ok = natural && round_trip;
    return o;
}

Outcome cmd_laws(const std::vector<std::string>& suites, std::uint64_t seed, std::size_t size, std::size_t count) {
    Outcome o;
    Json reports = Json::array();
    std::ostringstream pretty;
    for (const std::string& name : suites) {
        laws::Params p;
        p.seed = seed;
        p.size = size;
        p.count = count;
        laws::Report rep = laws::run_suite(name, p);
        Json lj = Json::object();
        for (const auto& [law, t] : rep.laws()) lj[law] = Json{{"checks", t.checks}, {"failures", t.failures}};
        Json ws = Json::array();
        for (const auto& w : rep.witnesses()) ws.push_back(Json{{"law", w.law}, {"witness", w.detail}});
        reports.push_back(Json{{"suite", name},
                               {"passed", rep.passed()},
                               {"checks", rep.checks()},
                               {"failures", rep.failures()},
                               {"laws", std::move(lj)},
                               {"witnesses", std::move(ws)}});
        o.ok = o.ok && rep.passed();
        pretty << (rep.passed() ? "PASS" : "FAIL") << "  " << name << "  " << rep.checks() << " checks, "
               << rep.failures() << " failures\n";
        for (const auto& [law, t] : rep.laws()) pretty << "      " << law << ": " << t.checks << " / " << t.failures << "\n";
        for (const auto& w : rep.witnesses()) pretty << "    witness  " << w.law << ": " << w.detail << "\n";
    }
    o.outputs["seed"] = seed;
    o.outputs["size"] = size;
    o.outputs["suites"] = std::move(reports);
    o.pretty = pretty.str();
    return o;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Continuous-logic semantics over finite metric spaces and presheaves", "contsem"};
    app.require_subcommand(1);
    app.fallthrough();
    bool pretty = false;
    app.add_flag("--pretty", pretty, "human-readable output instead of JSON");

    std::string file, formula, family, modulus, kind, over, predicate;
    std::vector<std::string> envs;
    std::size_t grid = 0;
    std::string suite;
    std::uint64_t seed = 1;
    std::size_t size = 0, count = 0;

    auto* validate = app.add_subcommand("validate", "check a structure or presheaf file");
    validate->add_option("file", file)->required();

    auto* eval = app.add_subcommand("eval", "evaluate a formula");
    eval->add_option("file", file)->required();
    eval->add_option("--formula", formula)->required();
    eval->add_option("--env", envs, "v=point, v=Space:point, or v:Space (free)");

    auto* env_cmd = app.add_subcommand("envelope", "least eps-predicate above a family");
    env_cmd->add_option("file", file)->required();
    env_cmd->add_option("--family", family)->required();
    env_cmd->add_option("--modulus", modulus)->required();

    auto* quant = app.add_subcommand("quantify", "inf or sup over the first factor of a product");
    quant->add_option("file", file)->required();
    quant->add_option("--kind", kind)->required()->check(CLI::IsMember({"inf", "sup"}));
    quant->add_option("--over", over)->required();
    quant->add_option("--predicate", predicate)->required();

    auto* classify = app.add_subcommand("classify", "classifying map into a grid");
    classify->add_option("file", file)->required();
    classify->add_option("--predicate", predicate)->required();
    classify->add_option("--grid", grid)->check(CLI::PositiveNumber);

    auto* pcheck = app.add_subcommand("presheaf-check", "check a presheaf file");
    pcheck->add_option("file", file)->required();

    auto* pclass = app.add_subcommand("presheaf-classify", "classify a presheaf predicate");
    pclass->add_option("file", file)->required();
    pclass->add_option("--predicate", predicate)->required();

    auto* law = app.add_subcommand("laws", "run law-checking suites");
    law->add_option("--suite", suite)->check(CLI::IsMember(laws::suite_names()));
    law->add_option("--seed", seed);
    law->add_option("--size", size)->check(CLI::PositiveNumber);
    law->add_option("--count", count)->check(CLI::PositiveNumber);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();
    Json report = Json::object();
    report["command"] = command;
    Json inputs = Json::object();

    try {
        if (!file.empty()) {
            inputs["file"] = file;
            inputs["digest"] = digest_of(file);
        }
        Outcome o;
        if (sub == validate) {
            o = cmd_validate(file);
        } else if (sub == eval) {
            inputs["formula"] = formula;
            inputs["env"] = envs;
            o = cmd_eval(file, formula, envs);
        } else if (sub == env_cmd) {
            inputs["family"] = family;
            inputs["modulus"] = modulus;
            o = cmd_envelope(file, family, modulus);
        } else if (sub == quant) {
            inputs["kind"] = kind;
            inputs["over"] = over;
            inputs["predicate"] = predicate;
            o = cmd_quantify(file, kind, over, predicate);
        } else if (sub == classify) {
            inputs["predicate"] = predicate;
            if (grid) inputs["grid"] = grid;
            o = cmd_classify(file, predicate, grid);
        } else if (sub == pcheck) {
            o = cmd_presheaf_check(file);
        } else if (sub == pclass) {
            inputs["predicate"] = predicate;
            o = cmd_presheaf_classify(file, predicate);
        } else {
            std::vector<std::string> suites = suite.empty() ? laws::suite_names() : std::vector<std::string>{suite};
            inputs["suites"] = suites;
            o = cmd_laws(suites, seed, size, count);
        }
        report["inputs"] = std::move(inputs);
        report["status"] = o.ok ? "ok" : "failed";
        report["outputs"] = std::move(o.outputs);
        if (pretty) {
            out << o.pretty;
        } else {
            out << report.dump(2) << "\n";
        }
        return o.ok ? 0 : 1;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const io::FileNotFoundError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        report["inputs"] = std::move(inputs);
        report["status"] = "error";
        report["error"] = e.what();
        if (pretty) {
            out << "error: " << e.what() << "\n";
        } else {
            out << report.dump(2) << "\n";
        }
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace contsem::cli
