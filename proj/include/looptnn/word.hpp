#pragma once

#include <variant>
#include <vector>

#include "looptnn/band.hpp"

namespace looptnn {

// An n-tuple of nonnegative rationals, the parameters of a whirl or curl.
// Indices are taken mod n; tuples are 1-based through val().
struct ParamTuple {
    std::vector<Rat> v;

    ParamTuple() = default;
    explicit ParamTuple(std::vector<Rat> vals) : v(std::move(vals)) {}

    int n() const { return static_cast<int>(v.size()); }
    const Rat& val(long long i) const {
        long long r = (i - 1) % n();
        if (r < 0) r += n();
        return v[static_cast<size_t>(r)];
    }
    Rat product() const {
        Rat p(1);
        for (const auto& x : v) p *= x;
        return p;
    }
    bool degenerate() const {
        for (const auto& x : v)
            if (x == 0) return true;
        return false;
    }
    bool nonnegative() const {
        for (const auto& x : v)
            if (x < 0) return false;
        return true;
    }
};

inline bool operator==(const ParamTuple& a, const ParamTuple& b) { return a.v == b.v; }
inline bool operator!=(const ParamTuple& a, const ParamTuple& b) { return !(a == b); }

// word atoms
struct WhirlAtom { ParamTuple params; };
struct CurlAtom { ParamTuple params; };
struct ChevE { int k; Rat a; };
struct ChevF { int k; Rat a; };
struct ShiftPow { int k; };
struct TorusAtom { std::vector<Rat> d; };

using Atom = std::variant<WhirlAtom, CurlAtom, ChevE, ChevF, ShiftPow, TorusAtom>;

// An ordered product of atoms, multiplied left to right.
struct GeneratorWord {
    int n = 1;
    std::vector<Atom> atoms;

    GeneratorWord() = default;
    explicit GeneratorWord(int n_) : n(n_) {}

    bool has_curl() const {
        for (const auto& a : atoms)
            if (std::holds_alternative<CurlAtom>(a)) return true;
        return false;
    }
    size_t count_whirls() const {
        size_t c = 0;
        for (const auto& a : atoms)
            if (std::holds_alternative<WhirlAtom>(a)) ++c;
        return c;
    }
};

inline PeriodicBandMatrix atom_matrix(int n, const Atom& atom, int curl_hi) {
    if (const auto* w = std::get_if<WhirlAtom>(&atom)) {
        if (w->params.n() != n) fail("BAD_INPUT", "whirl tuple size mismatch");
        return whirl(w->params.v);
    }
    if (const auto* c = std::get_if<CurlAtom>(&atom)) {
        if (c->params.n() != n) fail("BAD_INPUT", "curl tuple size mismatch");
        return curl(c->params.v, curl_hi);
    }
    if (const auto* e = std::get_if<ChevE>(&atom)) return chevalley_e(n, e->k, e->a);
    if (const auto* f = std::get_if<ChevF>(&atom)) return chevalley_f(n, f->k, f->a);
    if (const auto* s = std::get_if<ShiftPow>(&atom)) return shift_pow(n, s->k);
    const auto& t = std::get<TorusAtom>(atom);
    return torus(n, t.d);
}

// Left-to-right product of the atoms.  curl_hi is the window used for curl
// atoms; since all curls are upper-triangular their truncation survives the
// product, and the result is exact on the returned window.
inline PeriodicBandMatrix evaluate(const GeneratorWord& w, int curl_hi = 16) {
    PeriodicBandMatrix acc = PeriodicBandMatrix::identity(w.n);
    for (const auto& atom : w.atoms) acc = multiply(acc, atom_matrix(w.n, atom, curl_hi));
    return acc;
}

} // namespace looptnn
