#pragma once

#include <future>
#include <optional>

#include "looptnn/whirl_curl.hpp"

namespace looptnn {
namespace positivity {

struct MinorRef {
    std::vector<long long> I, J;
    Rat value;
};

enum class TnnStatus { REFUTED, NO_VIOLATION_UP_TO_WINDOW, CERTIFIED };

struct TnnVerdict {
    TnnStatus status;
    std::optional<MinorRef> witness;       // negative minor when REFUTED
    std::optional<GeneratorWord> certificate; // nonnegative word when CERTIFIED
};

namespace detail {

// first r-subset of {0..w-1} in lexicographic order, advanced in place
inline bool next_subset(std::vector<int>& idx, int w) {
    int r = static_cast<int>(idx.size());
    for (int t = r - 1; t >= 0; --t) {
        if (idx[t] < w - (r - t)) {
            ++idx[t];
            for (int s = t + 1; s < r; ++s) idx[s] = idx[s - 1] + 1;
            return true;
        }
    }
    return false;
}

inline std::optional<MinorRef> scan_row_block(const PeriodicBandMatrix& x, int i, int r,
                                              long long col_lo, long long col_hi,
                                              long long budget) {
    int w = static_cast<int>(col_hi - col_lo + 1);
    if (w < r) return std::nullopt;
    std::vector<long long> I(r);
    for (int t = 0; t < r; ++t) I[t] = i + t;
    std::vector<int> idx(r);
    for (int t = 0; t < r; ++t) idx[t] = t;
    long long used = 0;
    do {
        if (++used > budget) fail("BUDGET_EXCEEDED", "minor search budget exhausted");
        std::vector<long long> J(r);
        for (int t = 0; t < r; ++t) J[t] = col_lo + idx[t];
        Rat v = minor_det(x, I, J);
        if (v < 0) return MinorRef{I, J, v};
    } while (next_subset(idx, w));
    return std::nullopt;
}

} // namespace detail

// Searches row-solid minors (consecutive rows starting in {1..n}, arbitrary
// column sets inside the window) for a negative value.  A hit refutes total
// nonnegativity; absence is only a necessary-condition pass on the window.
inline std::optional<MinorRef> find_negative_minor(const PeriodicBandMatrix& x,
                                                   int max_rows = -1, int col_window = -1,
                                                   int threads = 1,
                                                   long long budget = 4000000) {
    int n = x.n();
    if (max_rows < 0) max_rows = 2 * n + 2;
    for (int r = 1; r <= max_rows; ++r) {
        std::vector<std::optional<MinorRef>> found(n);
        auto run = [&](int i) -> std::optional<MinorRef> {
            // every entry of rows i..i+r-1 with offset <= d_hi is known;
            // outside [col_lo, col_hi] the block has zero columns
            long long col_lo = i + x.d_lo();
            long long col_hi = static_cast<long long>(i) + r - 1 + x.d_hi();
            if (!x.exact_above()) col_hi = i + x.d_hi();
            if (col_window > 0 && col_hi - col_lo + 1 > col_window)
                col_hi = col_lo + col_window - 1;
            return detail::scan_row_block(x, i, r, col_lo, col_hi, budget / std::max(n, 1));
        };
        if (threads > 1 && n > 1) {
            std::vector<std::future<std::optional<MinorRef>>> futs;
            for (int i = 1; i <= n; ++i)
                futs.push_back(std::async(std::launch::async, run, i));
            for (int i = 1; i <= n; ++i) found[i - 1] = futs[i - 1].get();
        } else {
            for (int i = 1; i <= n; ++i) found[i - 1] = run(i);
        }
        for (int i = 0; i < n; ++i)
            if (found[i]) return found[i];
    }
    return std::nullopt;
}

// Lemma-style consistency check for upper-unitriangular TNN windows: a zero
// entry above the diagonal with a nonzero entry strictly northeast of it is
// reported (for a TNN matrix all such entries must vanish).
inline std::optional<std::pair<long long, long long>> fs_violation(const PeriodicBandMatrix& x) {
    for (int i = 1; i <= x.n(); ++i)
        for (int d = 1; d <= x.d_hi(); ++d) {
            if (x.cell(i, d) != 0) continue;
            long long j = i + d;
            for (int d2 = d + 1; d2 <= x.d_hi(); ++d2)
                if (x.cell(i, d2) != 0) return std::make_pair<long long, long long>(i, i + d);
            for (long long i2 = i - 1; i2 > i - x.n() && j - i2 <= x.d_hi(); --i2)
                if (x.at(i2, j) != 0) return std::make_pair<long long, long long>(i, i + d);
        }
    return std::nullopt;
}

// --------------------------------------------------------------------------
// total positivity test on a window

struct TpVerdict {
    bool refuted = false; // a vanishing minor with I <= J was found
    std::optional<MinorRef> witness;
    std::optional<MinorRef> solid_witness; // solid vanishing minor (propagated)
};

// Checks Delta_{I,J} > 0 for all I <= J (componentwise) of size <= k_max with
// indices in [1, window].  A vanishing such minor refutes total positivity of
// an upper-unitriangular TNN matrix; none vanishing is only a pass up to the
// window.
inline TpVerdict is_tp_window(const PeriodicBandMatrix& x, int k_max, int window,
                              long long budget = 4000000) {
    if (window < 2) fail("WINDOW", "tp window too small");
    TpVerdict out;
    long long used = 0;
    for (int k = 1; k <= k_max && !out.refuted; ++k) {
        std::vector<int> ridx(k), cidx(k);
        for (int t = 0; t < k; ++t) ridx[t] = t;
        do {
            std::vector<int> c0(k);
            for (int t = 0; t < k; ++t) c0[t] = t;
            cidx = c0;
            do {
                bool le = true;
                for (int t = 0; t < k; ++t)
                    if (ridx[t] > cidx[t]) { le = false; break; }
                if (le) {
                    if (++used > budget) fail("BUDGET_EXCEEDED", "tp scan budget exhausted");
                    std::vector<long long> I(k), J(k);
                    for (int t = 0; t < k; ++t) {
                        I[t] = ridx[t] + 1;
                        J[t] = cidx[t] + 1;
                    }
                    bool in_window = true;
                    for (int t = 0; t < k; ++t)
                        if (J[t] - I[k - 1] > x.d_hi() && !x.exact_above()) in_window = false;
                    if (in_window) {
                        Rat v = minor_det(x, I, J);
                        if (v == 0) {
                            out.refuted = true;
                            out.witness = MinorRef{I, J, v};
                            break;
                        }
                    }
                }
            } while (detail::next_subset(cidx, window));
            if (out.refuted) break;
        } while (detail::next_subset(ridx, window));
    }
    if (out.refuted) {
        // by minor propagation a solid vanishing minor of the same size exists
        int k = static_cast<int>(out.witness->I.size());
        for (int i0 = 1; i0 + k - 1 <= window && !out.solid_witness; ++i0)
            for (int j0 = i0; j0 + k - 1 <= window; ++j0) {
                std::vector<long long> I(k), J(k);
                for (int t = 0; t < k; ++t) {
                    I[t] = i0 + t;
                    J[t] = j0 + t;
                }
                if (!x.exact_above() && J[k - 1] - I[0] > x.d_hi()) continue;
                if (minor_det(x, I, J) == 0) {
                    out.solid_witness = MinorRef{I, J, Rat(0)};
                    break;
                }
            }
    }
    return out;
}

// --------------------------------------------------------------------------
// epsilon / mu sequences

struct EpsilonResult {
    enum class Mode { EXACT_FROM_WORD, ESTIMATED } mode;
    std::vector<Rat> values;                  // exact values (EXACT mode)
    std::vector<std::pair<Rat, Rat>> intervals; // [lo,hi] per residue (ESTIMATED)
    std::vector<ParamTuple> candidates;       // ambiguous leading tuples on ties
    bool converged = true;
};

// Sorts curl tuples by non-increasing parameter product with eta swaps
// (stable bubble sort); the curl product is preserved exactly.
inline whirl_curl::ParamList sort_curls_desc(whirl_curl::ParamList list) {
    size_t m = list.size();
    for (size_t pass = 0; pass + 1 < m; ++pass)
        for (size_t i = 0; i + 1 < m - pass; ++i)
            if (list[i].product() < list[i + 1].product())
                whirl_curl::curl_swap(list[i], list[i + 1]);
    return list;
}

inline whirl_curl::ParamList curl_tuples_of(const GeneratorWord& w) {
    whirl_curl::ParamList list;
    for (const auto& atom : w.atoms) {
        const auto* c = std::get_if<CurlAtom>(&atom);
        if (!c) fail("BAD_INPUT", "exact epsilon mode needs a word of curl atoms");
        list.push_back(c->params);
    }
    return list;
}

// Ratio estimate on a stored window.  Ratios x_{i,j}/x_{i+1,j} are
// non-increasing in j for TNN matrices; the last available ratios give an
// upper bound, and a geometric-decay extrapolation gives the lower end.
// The interval is heuristic and reported as such via `converged`.
inline EpsilonResult epsilon_estimate(const PeriodicBandMatrix& x,
                                      const Rat& tolerance = Rat(1, 1000000)) {
    int n = x.n();
    EpsilonResult r;
    r.mode = EpsilonResult::Mode::ESTIMATED;
    r.converged = true;
    for (int i = 1; i <= n; ++i) {
        // ratios along a fixed column class (steps of n) so that the
        // decrements decay geometrically rather than oscillating with parity
        std::vector<Rat> ratios;
        for (int d = x.d_hi() - 2 * n; d <= x.d_hi(); d += n) {
            if (d < 2) continue;
            const Rat& num = x.cell(i, d);
            const Rat& den = x.cell(x.rep(i + 1), d - 1);
            if (den == 0) continue;
            ratios.push_back(num / den);
        }
        if (ratios.empty()) {
            r.intervals.emplace_back(Rat(0), Rat(0));
            continue;
        }
        Rat hi = ratios.back();
        Rat lo(0);
        bool conv = false;
        if (ratios.size() >= 3) {
            Rat d1 = ratios[ratios.size() - 3] - ratios[ratios.size() - 2];
            Rat d2 = ratios[ratios.size() - 2] - ratios.back();
            if (d1 > 0 && d2 >= 0 && d2 < d1) {
                Rat q = d2 / d1;
                Rat slack = d2 * q / (1 - q);
                lo = hi - slack;
                if (lo < 0) lo = 0;
                conv = (d2 <= tolerance);
            } else if (d1 == 0 && d2 == 0) {
                lo = hi;
                conv = true;
            }
        }
        if (!conv) r.converged = false;
        r.intervals.emplace_back(lo, hi);
    }
    return r;
}

// Exact epsilon of a finite product of curls: eta-sort so the factor with the
// maximal parameter product comes first; its tuple is the epsilon-sequence.
// A tie between distinct leading tuples is ambiguous; both candidates are
// reported and the estimate (from an evaluated window) is returned instead.
inline EpsilonResult epsilon_sequence(const GeneratorWord& w, int window = 24) {
    auto list = curl_tuples_of(w);
    if (list.empty()) fail("BAD_INPUT", "empty curl word");
    auto sorted = sort_curls_desc(list);
    Rat maxp = sorted.front().product();
    std::vector<ParamTuple> cands;
    for (const auto& t : sorted)
        if (t.product() == maxp) {
            bool dup = false;
            for (const auto& c : cands) dup = dup || c == t;
            if (!dup) cands.push_back(t);
        }
    if (cands.size() > 1) {
        EpsilonResult r = epsilon_estimate(evaluate(w, window));
        r.candidates = cands;
        return r;
    }
    EpsilonResult r;
    r.mode = EpsilonResult::Mode::EXACT_FROM_WORD;
    r.values = sorted.front().v;
    r.candidates = cands;
    return r;
}

// mu: sort ascending so the maximal product is the last factor; its tuple is
// the row-ratio limit sequence.
inline EpsilonResult mu_sequence(const GeneratorWord& w, int window = 24) {
    auto sorted = curl_tuples_of(w);
    if (sorted.empty()) fail("BAD_INPUT", "empty curl word");
    size_t m = sorted.size();
    for (size_t pass = 0; pass + 1 < m; ++pass)
        for (size_t i = 0; i + 1 < m - pass; ++i)
            if (sorted[i].product() > sorted[i + 1].product())
                whirl_curl::curl_swap(sorted[i], sorted[i + 1]);
    Rat maxp = sorted.back().product();
    std::vector<ParamTuple> cands;
    for (const auto& t : sorted)
        if (t.product() == maxp) {
            bool dup = false;
            for (const auto& c : cands) dup = dup || c == t;
            if (!dup) cands.push_back(t);
        }
    if (cands.size() > 1) {
        EpsilonResult r = epsilon_estimate(evaluate(w, window));
        r.candidates = cands;
        return r;
    }
    EpsilonResult r;
    r.mode = EpsilonResult::Mode::EXACT_FROM_WORD;
    r.values = sorted.back().v;
    r.candidates = cands;
    return r;
}

// mu estimate: ratios x_{j,i+1}/x_{j,i} for j -> -infty, pulled back to the
// stored strip by periodicity.
inline EpsilonResult mu_estimate(const PeriodicBandMatrix& x,
                                 const Rat& tolerance = Rat(1, 1000000)) {
    int n = x.n();
    EpsilonResult r;
    r.mode = EpsilonResult::Mode::ESTIMATED;
    for (int i = 1; i <= n; ++i) {
        std::vector<Rat> ratios;
        long long smax = (x.d_hi() + 1 - (i + 1)) / n;
        for (long long s = std::max(0LL, smax - 2); s <= smax; ++s) {
            long long jnum = i + 1 + s * n, jden = i + s * n;
            if (jnum - 1 > x.d_hi()) break;
            Rat den = x.at(1, jden);
            if (den == 0) continue;
            ratios.push_back(x.at(1, jnum) / den);
        }
        if (ratios.empty()) {
            r.intervals.emplace_back(Rat(0), Rat(0));
            r.converged = false;
            continue;
        }
        Rat hi = ratios.back();
        Rat lo(0);
        bool conv = false;
        if (ratios.size() >= 3) {
            Rat d1 = ratios[ratios.size() - 3] - ratios[ratios.size() - 2];
            Rat d2 = ratios[ratios.size() - 2] - ratios.back();
            if (d1 > 0 && d2 >= 0 && d2 < d1) {
                Rat q = d2 / d1;
                lo = hi - d2 * q / (1 - q);
                if (lo < 0) lo = 0;
                conv = (d2 <= tolerance);
            } else if (d1 == 0 && d2 == 0) {
                lo = hi;
                conv = true;
            }
        }
        if (!conv) r.converged = false;
        r.intervals.emplace_back(lo, hi);
    }
    return r;
}

// radius of convergence r(X) = 1/(prod_i epsilon_i); for a curl word this is
// 1/max_i (prod_j b_j^{(i)}).
inline Rat radius(const GeneratorWord& w) {
    auto list = curl_tuples_of(w);
    Rat maxp(0);
    for (const auto& t : list) maxp = std::max(maxp, t.product());
    if (maxp == 0) fail("BAD_INPUT", "radius of a degenerate-only curl word is infinite");
    return Rat(1) / maxp;
}

} // namespace positivity
} // namespace looptnn
