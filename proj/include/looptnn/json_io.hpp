#pragma once

#include <json.hpp>

#include "looptnn/cylnet.hpp"
#include "looptnn/factorization.hpp"
#include "looptnn/lsym.hpp"

namespace looptnn {
namespace io {

using nlohmann::json;

inline constexpr const char* kSchema = "loopgroup-tnn/1";

// Rationals travel as decimal-free strings ("p/q" or "p"); plain JSON
// integers are accepted, floats are rejected to keep the exactness contract.
inline Rat rat_from_json(const json& j) {
    if (j.is_string()) return parse_rat(j.get<std::string>());
    if (j.is_number_integer()) return Rat(static_cast<long long>(j.get<long long>()));
    if (j.is_number_unsigned()) return Rat(static_cast<unsigned long long>(j.get<unsigned long long>()));
    if (j.is_number_float()) fail("BAD_INPUT", "float literals are rejected; use \"p/q\"");
    fail("BAD_INPUT", "expected a rational literal");
}

inline json rat_to_json(const Rat& r) { return rat_str(r); }

inline void check_schema(const json& j) {
    if (j.contains("schema") && j["schema"] != kSchema)
        fail("BAD_INPUT", "unsupported schema tag");
}

// ----- PeriodicBandMatrix ---------------------------------------------------

inline json to_json(const PeriodicBandMatrix& x) {
    json rows = json::array();
    for (int i = 1; i <= x.n(); ++i) {
        json row = json::array();
        for (int d = x.d_lo(); d <= x.d_hi(); ++d) row.push_back(rat_to_json(x.cell(i, d)));
        rows.push_back(row);
    }
    return json{{"schema", kSchema}, {"n", x.n()},       {"d_lo", x.d_lo()},
                {"d_hi", x.d_hi()},  {"exact_above", x.exact_above()}, {"rows", rows}};
}

inline PeriodicBandMatrix matrix_from_json(const json& j) {
    check_schema(j);
    for (const char* key : {"n", "d_lo", "d_hi", "exact_above", "rows"})
        if (!j.contains(key)) fail("BAD_INPUT", std::string("matrix JSON missing ") + key);
    PeriodicBandMatrix x(j["n"].get<int>(), j["d_lo"].get<int>(), j["d_hi"].get<int>(),
                         j["exact_above"].get<bool>());
    const auto& rows = j["rows"];
    if (static_cast<int>(rows.size()) != x.n()) fail("BAD_INPUT", "row count mismatch");
    for (int i = 1; i <= x.n(); ++i) {
        if (static_cast<int>(rows[i - 1].size()) != x.width())
            fail("BAD_INPUT", "row width mismatch");
        for (int d = x.d_lo(); d <= x.d_hi(); ++d)
            x.set(i, d, rat_from_json(rows[i - 1][d - x.d_lo()]));
    }
    return x;
}

// ----- Laurent polynomials / matrices ---------------------------------------

inline json to_json(const LaurentPoly& p) {
    json terms = json::array();
    for (const auto& [deg, c] : p.coef) terms.push_back(json{{"deg", deg}, {"coef", rat_to_json(c)}});
    json out{{"terms", terms}};
    if (p.trunc) out["trunc"] = *p.trunc;
    return out;
}

inline LaurentPoly laurent_from_json(const json& j) {
    LaurentPoly p;
    const json& terms = j.contains("terms") ? j["terms"] : j;
    for (const auto& t : terms) p.coef[t["deg"].get<int>()] = rat_from_json(t["coef"]);
    if (j.is_object() && j.contains("trunc")) p.trunc = j["trunc"].get<int>();
    p.normalize();
    return p;
}

inline json to_json(const LaurentMatrix& a) {
    json entries = json::array();
    for (int i = 0; i < a.n; ++i) {
        json row = json::array();
        for (int jj = 0; jj < a.n; ++jj) {
            json terms = json::array();
            for (const auto& [deg, c] : a.entries[i][jj].coef)
                terms.push_back(json{{"deg", deg}, {"coef", rat_to_json(c)}});
            row.push_back(terms);
        }
        entries.push_back(row);
    }
    json out{{"schema", kSchema}, {"n", a.n}, {"entries", entries}};
    if (a.trunc) out["trunc"] = *a.trunc;
    return out;
}

inline LaurentMatrix laurent_matrix_from_json(const json& j) {
    check_schema(j);
    if (!j.contains("n") || !j.contains("entries")) fail("BAD_INPUT", "Laurent matrix JSON needs n and entries");
    LaurentMatrix a(j["n"].get<int>());
    if (j.contains("trunc")) a.trunc = j["trunc"].get<int>();
    const auto& entries = j["entries"];
    if (static_cast<int>(entries.size()) != a.n) fail("BAD_INPUT", "entry row count mismatch");
    for (int i = 0; i < a.n; ++i)
        for (int jj = 0; jj < a.n; ++jj) {
            LaurentPoly p;
            for (const auto& t : entries[i][jj]) p.coef[t["deg"].get<int>()] = rat_from_json(t["coef"]);
            p.trunc = a.trunc;
            p.normalize();
            a.entries[i][jj] = p;
        }
    return a;
}

// ----- tuples and words -------------------------------------------------------

inline json to_json(const ParamTuple& t) {
    json vals = json::array();
    for (const auto& v : t.v) vals.push_back(rat_to_json(v));
    return json{{"n", t.n()}, {"values", vals}};
}

inline ParamTuple tuple_from_json(const json& j) {
    ParamTuple t;
    const json& vals = j.is_array() ? j : j.at("values");
    for (const auto& v : vals) t.v.push_back(rat_from_json(v));
    if (j.is_object() && j.contains("n") && j["n"].get<int>() != t.n())
        fail("BAD_INPUT", "tuple length disagrees with n");
    if (t.v.empty()) fail("BAD_INPUT", "empty parameter tuple");
    return t;
}

inline json to_json(const GeneratorWord& w) {
    json atoms = json::array();
    for (const auto& atom : w.atoms) {
        if (const auto* wa = std::get_if<WhirlAtom>(&atom)) {
            json vals = json::array();
            for (const auto& v : wa->params.v) vals.push_back(rat_to_json(v));
            atoms.push_back(json{{"kind", "whirl"}, {"values", vals}});
        } else if (const auto* c = std::get_if<CurlAtom>(&atom)) {
            json vals = json::array();
            for (const auto& v : c->params.v) vals.push_back(rat_to_json(v));
            atoms.push_back(json{{"kind", "curl"}, {"values", vals}});
        } else if (const auto* e = std::get_if<ChevE>(&atom)) {
            atoms.push_back(json{{"kind", "e"}, {"k", e->k}, {"a", rat_to_json(e->a)}});
        } else if (const auto* f = std::get_if<ChevF>(&atom)) {
            atoms.push_back(json{{"kind", "f"}, {"k", f->k}, {"a", rat_to_json(f->a)}});
        } else if (const auto* s = std::get_if<ShiftPow>(&atom)) {
            atoms.push_back(json{{"kind", "shift"}, {"k", s->k}});
        } else {
            const auto& t = std::get<TorusAtom>(atom);
            json vals = json::array();
            for (const auto& v : t.d) vals.push_back(rat_to_json(v));
            atoms.push_back(json{{"kind", "torus"}, {"values", vals}});
        }
    }
    return json{{"schema", kSchema}, {"n", w.n}, {"atoms", atoms}};
}

inline GeneratorWord word_from_json(const json& j) {
    check_schema(j);
    if (!j.contains("n") || !j.contains("atoms")) fail("BAD_INPUT", "word JSON needs n and atoms");
    GeneratorWord w(j["n"].get<int>());
    if (w.n <= 0) fail("BAD_INPUT", "period n must be positive");
    for (const auto& a : j["atoms"]) {
        std::string kind = a.at("kind").get<std::string>();
        if (kind == "whirl") w.atoms.push_back(WhirlAtom{tuple_from_json(a.at("values"))});
        else if (kind == "curl") w.atoms.push_back(CurlAtom{tuple_from_json(a.at("values"))});
        else if (kind == "e") w.atoms.push_back(ChevE{a.at("k").get<int>(), rat_from_json(a.at("a"))});
        else if (kind == "f") w.atoms.push_back(ChevF{a.at("k").get<int>(), rat_from_json(a.at("a"))});
        else if (kind == "shift") w.atoms.push_back(ShiftPow{a.at("k").get<int>()});
        else if (kind == "torus") w.atoms.push_back(TorusAtom{tuple_from_json(a.at("values")).v});
        else fail("BAD_INPUT", "unknown atom kind: " + kind);
    }
    return w;
}

// ----- networks ---------------------------------------------------------------

inline json to_json(const cylnet::CylNetwork& net) {
    json vs = json::array(), es = json::array(), src = json::array(), snk = json::array();
    for (const auto& v : net.vertices) vs.push_back(json{{"id", v.id}, {"height", v.height}});
    for (const auto& e : net.edges)
        es.push_back(json{{"from", e.from}, {"to", e.to}, {"weight", rat_to_json(e.weight)},
                          {"cross", e.cross}});
    for (int s : net.sources) src.push_back(s);
    for (int s : net.sinks) snk.push_back(s);
    return json{{"schema", kSchema}, {"n", net.n},      {"vertices", vs},
                {"edges", es},       {"sources", src},  {"sinks", snk}};
}

inline cylnet::CylNetwork network_from_json(const json& j) {
    check_schema(j);
    cylnet::CylNetwork net;
    net.n = j.at("n").get<int>();
    for (const auto& v : j.at("vertices"))
        net.vertices.push_back({v.at("id").get<int>(), v.at("height").get<long long>()});
    for (const auto& e : j.at("edges"))
        net.edges.push_back({e.at("from").get<int>(), e.at("to").get<int>(),
                             rat_from_json(e.at("weight")), e.at("cross").get<int>()});
    for (const auto& s : j.at("sources")) net.sources.push_back(s.get<int>());
    for (const auto& s : j.at("sinks")) net.sinks.push_back(s.get<int>());
    net.validate();
    return net;
}

// ----- verdicts ----------------------------------------------------------------

inline json to_json(const positivity::MinorRef& m) {
    json I = json::array(), J = json::array();
    for (auto v : m.I) I.push_back(v);
    for (auto v : m.J) J.push_back(v);
    return json{{"rows", I}, {"cols", J}, {"value", rat_to_json(m.value)}};
}

inline json to_json(const positivity::TnnVerdict& v) {
    json out{{"schema", kSchema}};
    switch (v.status) {
        case positivity::TnnStatus::REFUTED: out["status"] = "REFUTED"; break;
        case positivity::TnnStatus::NO_VIOLATION_UP_TO_WINDOW:
            out["status"] = "NO_VIOLATION_UP_TO_WINDOW";
            break;
        case positivity::TnnStatus::CERTIFIED: out["status"] = "CERTIFIED"; break;
    }
    out["witness"] = v.witness ? to_json(*v.witness) : json(nullptr);
    out["certificate"] = v.certificate ? to_json(*v.certificate)["atoms"] : json(nullptr);
    return out;
}

inline json to_json(const lsym::SkewShape& s) {
    json outer = json::array(), inner = json::array();
    for (auto p : s.outer) outer.push_back(p);
    for (auto p : s.inner) inner.push_back(p);
    return json{{"outer", outer}, {"inner", inner}, {"n", s.n}};
}

inline lsym::SkewShape shape_from_json(const json& j) {
    std::vector<long long> outer, inner;
    for (const auto& p : j.at("outer")) outer.push_back(p.get<long long>());
    if (j.contains("inner"))
        for (const auto& p : j.at("inner")) inner.push_back(p.get<long long>());
    return lsym::SkewShape(std::move(outer), std::move(inner), j.at("n").get<int>());
}

} // namespace io
} // namespace looptnn
