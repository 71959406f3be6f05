#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "looptnn/laurent.hpp"

namespace looptnn {
namespace detail {

using BigFloat = boost::multiprecision::cpp_bin_float_100;

// dense polynomial over Q, coefficient of u^k at index k
using QPoly = std::vector<Rat>;

inline void qp_trim(QPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline int qp_deg(const QPoly& p) { return static_cast<int>(p.size()) - 1; }

inline Rat qp_eval(const QPoly& p, const Rat& u) {
    Rat acc(0);
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * u + *it;
    return acc;
}

inline BigFloat qp_eval_f(const QPoly& p, const BigFloat& u) {
    BigFloat acc(0);
    for (auto it = p.rbegin(); it != p.rend(); ++it)
        acc = acc * u + BigFloat(numerator(*it).str()) / BigFloat(denominator(*it).str());
    return acc;
}

inline QPoly qp_derivative(const QPoly& p) {
    QPoly d;
    for (size_t k = 1; k < p.size(); ++k) d.push_back(p[k] * Rat(static_cast<long>(k)));
    qp_trim(d);
    return d;
}

// remainder of a by b (b nonzero); quotient discarded
inline QPoly qp_mod(QPoly a, const QPoly& b) {
    qp_trim(a);
    while (qp_deg(a) >= qp_deg(b) && !a.empty()) {
        Rat f = a.back() / b.back();
        int shift = qp_deg(a) - qp_deg(b);
        for (size_t k = 0; k < b.size(); ++k) a[k + shift] -= f * b[k];
        qp_trim(a);
    }
    return a;
}

// exact division; fails if not divisible
inline QPoly qp_div_exact(QPoly a, const QPoly& b) {
    qp_trim(a);
    QPoly q(std::max(0, qp_deg(a) - qp_deg(b) + 1), Rat(0));
    while (qp_deg(a) >= qp_deg(b) && !a.empty()) {
        Rat f = a.back() / b.back();
        int shift = qp_deg(a) - qp_deg(b);
        q[shift] = f;
        for (size_t k = 0; k < b.size(); ++k) a[k + shift] -= f * b[k];
        qp_trim(a);
    }
    if (!a.empty()) fail("BAD_INPUT", "inexact polynomial division");
    return q;
}

inline QPoly qp_gcd(QPoly a, QPoly b) {
    qp_trim(a);
    qp_trim(b);
    while (!b.empty()) {
        QPoly r = qp_mod(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        Rat lead = a.back();
        for (auto& c : a) c /= lead;
    }
    return a;
}

// continued-fraction rationalization of x with denominator bound
inline std::optional<Rat> rationalize(const BigFloat& x, const BigInt& max_den) {
    if (x < 0) {
        auto r = rationalize(-x, max_den);
        if (r) return -*r;
        return std::nullopt;
    }
    BigInt p0(0), q0(1), p1(1), q1(0);
    BigFloat v = x;
    for (int it = 0; it < 200; ++it) {
        BigFloat fl = floor(v);
        BigInt a = fl.convert_to<BigInt>();
        BigInt p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        BigFloat frac = v - fl;
        if (frac < BigFloat(1e-80)) break;
        v = 1 / frac;
    }
    if (q1 == 0) return std::nullopt;
    return Rat(p1, q1);
}

// Positive rational roots of p with multiplicities.  Strategy: take the
// square-free part, isolate real roots in (0, bound) by sign-scanning plus
// bisection, rationalize each with continued fractions, and keep only the
// candidates that verify exactly.  Irrational roots are simply not reported.
inline std::vector<std::pair<Rat, int>> positive_rational_roots(const QPoly& p_in) {
    QPoly p = p_in;
    qp_trim(p);
    std::vector<std::pair<Rat, int>> out;
    if (qp_deg(p) < 1) return out;
    QPoly g = qp_gcd(p, qp_derivative(p));
    QPoly sf = (qp_deg(g) >= 1) ? qp_div_exact(p, g) : p;
    // Cauchy-style bound on positive roots of the square-free part
    BigFloat bound(1);
    {
        BigFloat lead = abs(qp_eval_f({sf.back()}, BigFloat(0)));
        BigFloat mx(0);
        for (size_t k = 0; k + 1 < sf.size(); ++k) {
            BigFloat c = abs(BigFloat(numerator(sf[k]).str())) /
                         BigFloat(denominator(sf[k]).str());
            if (c > mx) mx = c;
        }
        if (lead > 0) bound = 1 + mx / lead;
    }
    const int GRID = 4096;
    BigFloat lo(0), step = bound / GRID;
    BigFloat prev = qp_eval_f(sf, BigFloat(1e-60));
    std::vector<BigFloat> roots;
    for (int kk = 1; kk <= GRID; ++kk) {
        BigFloat u = step * kk;
        BigFloat val = qp_eval_f(sf, u);
        if (val == 0) {
            roots.push_back(u);
        } else if ((prev < 0 && val > 0) || (prev > 0 && val < 0)) {
            BigFloat a = step * (kk - 1), b = u;
            if (kk == 1) a = BigFloat(1e-60);
            for (int it = 0; it < 400; ++it) {
                BigFloat m = (a + b) / 2;
                BigFloat vm = qp_eval_f(sf, m);
                if (vm == 0) { a = b = m; break; }
                if ((vm < 0) == (qp_eval_f(sf, a) < 0)) a = m;
                else b = m;
            }
            roots.push_back((a + b) / 2);
        }
        prev = val;
    }
    for (const BigFloat& r : roots) {
        std::optional<Rat> cand;
        for (const char* denb : {"1000000", "1000000000000", "1000000000000000000000000"}) {
            auto c = rationalize(r, BigInt(denb));
            if (c && qp_eval(p, *c) == 0 && *c > 0) { cand = c; break; }
        }
        if (!cand) continue;
        // multiplicity by exact deflation
        QPoly cur = p;
        QPoly lin = {-*cand, Rat(1)};
        int mult = 0;
        while (qp_deg(cur) >= 1 && qp_eval(cur, *cand) == 0) {
            cur = qp_div_exact(cur, lin);
            ++mult;
        }
        bool dup = false;
        for (auto& [v, m] : out) dup = dup || v == *cand;
        if (!dup && mult > 0) out.emplace_back(*cand, mult);
    }
    return out;
}

} // namespace detail
} // namespace looptnn
