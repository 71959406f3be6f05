#pragma once

#include <map>
#include <optional>
#include <vector>

#include "looptnn/rational.hpp"

namespace looptnn {

// Laurent polynomial in t over Q, optionally a power series truncated at a
// recorded order: coefficients of t^k for k > trunc are unknown (not zero).
struct LaurentPoly {
    std::map<int, Rat> coef;           // degree -> coefficient, zeros erased
    std::optional<int> trunc;          // known up to and including this degree

    LaurentPoly() = default;
    explicit LaurentPoly(const Rat& c) {
        if (c != 0) coef[0] = c;
    }
    static LaurentPoly term(int deg, const Rat& c) {
        LaurentPoly p;
        if (c != 0) p.coef[deg] = c;
        return p;
    }

    bool is_zero() const { return coef.empty(); }
    bool is_exact() const { return !trunc.has_value(); }

    Rat at(int deg) const {
        if (trunc && deg > *trunc) fail("WINDOW", "coefficient beyond truncation order");
        auto it = coef.find(deg);
        return it == coef.end() ? Rat(0) : it->second;
    }
    int lowest_deg() const { return coef.empty() ? 0 : coef.begin()->first; }
    int highest_deg() const { return coef.empty() ? 0 : coef.rbegin()->first; }

    void normalize() {
        for (auto it = coef.begin(); it != coef.end();) {
            if (it->second == 0 || (trunc && it->first > *trunc))
                it = coef.erase(it);
            else
                ++it;
        }
    }
};

namespace detail {
inline std::optional<int> min_trunc(const std::optional<int>& a, const std::optional<int>& b) {
    if (!a) return b;
    if (!b) return a;
    return std::min(*a, *b);
}
} // namespace detail

inline LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) {
    LaurentPoly r = a;
    r.trunc = detail::min_trunc(a.trunc, b.trunc);
    for (const auto& [d, c] : b.coef) r.coef[d] += c;
    r.normalize();
    return r;
}

inline LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) {
    LaurentPoly r = a;
    r.trunc = detail::min_trunc(a.trunc, b.trunc);
    for (const auto& [d, c] : b.coef) r.coef[d] -= c;
    r.normalize();
    return r;
}

inline LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
    LaurentPoly r;
    // A truncated factor limits the product's known degrees: unknown tail of a
    // starts at a.trunc+1 and meets b's lowest degree.
    std::optional<int> tr;
    if (a.trunc) tr = detail::min_trunc(tr, *a.trunc + b.lowest_deg());
    if (b.trunc) tr = detail::min_trunc(tr, *b.trunc + a.lowest_deg());
    r.trunc = tr;
    for (const auto& [da, ca] : a.coef)
        for (const auto& [db, cb] : b.coef) r.coef[da + db] += ca * cb;
    r.normalize();
    return r;
}

inline bool operator==(const LaurentPoly& a, const LaurentPoly& b) {
    return a.coef == b.coef && a.trunc == b.trunc;
}

// n x n matrix of Laurent polynomials (the folding of a periodic matrix).
// If trunc is set, every entry is a power series known up to that order.
struct LaurentMatrix {
    int n = 0;
    std::vector<std::vector<LaurentPoly>> entries;
    std::optional<int> trunc;

    explicit LaurentMatrix(int n_ = 0)
        : n(n_), entries(n_, std::vector<LaurentPoly>(n_)) {}

    static LaurentMatrix identity(int n) {
        LaurentMatrix m(n);
        for (int i = 0; i < n; ++i) m.entries[i][i] = LaurentPoly(Rat(1));
        return m;
    }
};

inline bool operator==(const LaurentMatrix& a, const LaurentMatrix& b) {
    return a.n == b.n && a.trunc == b.trunc && a.entries == b.entries;
}

namespace detail {
// Expansion along the first remaining row, memoized on the set of remaining
// columns.  Fine for the small n this library deals with.
inline LaurentPoly det_rec(const LaurentMatrix& m, int row, unsigned cols,
                           std::map<unsigned, LaurentPoly>& memo) {
    if (cols == 0) return LaurentPoly(Rat(1));
    auto it = memo.find(cols);
    if (it != memo.end()) return it->second;
    LaurentPoly acc;
    int pos = 0;
    for (int col = 0; col < m.n; ++col) {
        if (!(cols & (1u << col))) continue;
        const LaurentPoly& e = m.entries[row][col];
        if (!(e.is_zero() && e.is_exact())) {
            LaurentPoly sub = det_rec(m, row + 1, cols & ~(1u << col), memo);
            LaurentPoly term = e * sub;
            if (pos % 2) acc = acc - term;
            else acc = acc + term;
        }
        ++pos;
    }
    memo.emplace(cols, acc);
    return acc;
}
} // namespace detail

inline LaurentPoly laurent_det(const LaurentMatrix& m) {
    int n = m.n;
    if (n == 0) return LaurentPoly(Rat(1));
    if (n > 12) fail("BUDGET_EXCEEDED", "laurent_det limited to n <= 12");
    std::map<unsigned, LaurentPoly> memo;
    LaurentPoly r = detail::det_rec(m, 0, (1u << n) - 1, memo);
    if (m.trunc) r.trunc = detail::min_trunc(r.trunc, m.trunc);
    r.normalize();
    return r;
}

} // namespace looptnn
