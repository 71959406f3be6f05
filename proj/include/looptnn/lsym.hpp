#pragma once

#include <functional>

#include "looptnn/whirl_curl.hpp"

namespace looptnn {
namespace lsym {

using whirl_curl::ParamList;

// Residued skew shape: weakly decreasing outer/inner with inner_r <= outer_r,
// drawn in English notation; a cell in row r, column c has content c - r and
// residue (c - r) mod n (mirror residue is the negation).
struct SkewShape {
    std::vector<long long> outer, inner;
    int n = 1;

    SkewShape() = default;
    SkewShape(std::vector<long long> out, std::vector<long long> in, int period)
        : outer(std::move(out)), inner(std::move(in)), n(period) {
        if (inner.size() < outer.size()) inner.resize(outer.size(), 0);
        validate();
    }

    void validate() const {
        if (n <= 0) fail("BAD_INPUT", "shape period must be positive");
        if (inner.size() != outer.size()) fail("BAD_INPUT", "inner/outer length mismatch");
        for (size_t r = 0; r < outer.size(); ++r) {
            if (outer[r] < 0 || inner[r] < 0) fail("BAD_INPUT", "negative part in shape");
            if (inner[r] > outer[r]) fail("BAD_INPUT", "inner part exceeds outer part");
            if (r + 1 < outer.size() &&
                (outer[r] < outer[r + 1] || inner[r] < inner[r + 1]))
                fail("BAD_INPUT", "shape parts must be weakly decreasing");
        }
    }

    int rows() const { return static_cast<int>(outer.size()); }
    long long cells() const {
        long long c = 0;
        for (size_t r = 0; r < outer.size(); ++r) c += outer[r] - inner[r];
        return c;
    }
    bool cell_in(int r, long long c) const { // 1-based row, absolute column
        return r >= 1 && r <= rows() && c > inner[r - 1] && c <= outer[r - 1];
    }
};

// lambda(I,J) = (j_k, j_{k-1}+1, ..., j_1+k-1)/(i_k, i_{k-1}+1, ..., i_1+k-1)
inline SkewShape shape_from_indices(const std::vector<long long>& I,
                                    const std::vector<long long>& J, int n) {
    if (I.size() != J.size() || I.empty()) fail("BAD_INPUT", "index sets must have equal size");
    int k = static_cast<int>(I.size());
    for (int t = 0; t + 1 < k; ++t)
        if (I[t] >= I[t + 1] || J[t] >= J[t + 1])
            fail("BAD_INPUT", "index sets must be strictly increasing");
    for (int t = 0; t < k; ++t)
        if (I[t] > J[t])
            fail("EMPTY_MINOR", "i_t > j_t: the minor vanishes and there is no shape");
    std::vector<long long> outer(k), inner(k);
    for (int s = 1; s <= k; ++s) {
        outer[s - 1] = J[k - s] + (s - 1);
        inner[s - 1] = I[k - s] + (s - 1);
    }
    return SkewShape(std::move(outer), std::move(inner), n);
}

// A semistandard filling of a skew shape with entries in {1..m}; weight
// a^T = prod_s a^{(T(s))}_{r(s)} (mirror residue when mirror is set).
struct Tableau {
    SkewShape shape;
    std::vector<std::vector<int>> fill; // fill[r][c - inner[r] - 1], 1-based values

    Rat weight(const ParamList& params, bool mirror = false) const {
        Rat w(1);
        for (int r = 1; r <= shape.rows(); ++r)
            for (long long c = shape.inner[r - 1] + 1; c <= shape.outer[r - 1]; ++c) {
                int v = fill[r - 1][static_cast<size_t>(c - shape.inner[r - 1] - 1)];
                long long content = c - r;
                const ParamTuple& t = params[static_cast<size_t>(v - 1)];
                w *= mirror ? t.val(-content) : t.val(content);
            }
        return w;
    }

    bool semistandard() const {
        for (int r = 1; r <= shape.rows(); ++r)
            for (long long c = shape.inner[r - 1] + 1; c <= shape.outer[r - 1]; ++c) {
                int v = fill[r - 1][static_cast<size_t>(c - shape.inner[r - 1] - 1)];
                if (c > shape.inner[r - 1] + 1) {
                    int left = fill[r - 1][static_cast<size_t>(c - shape.inner[r - 1] - 2)];
                    if (left > v) return false;
                }
                if (shape.cell_in(r - 1, c)) {
                    int up = fill[r - 2][static_cast<size_t>(c - shape.inner[r - 2] - 1)];
                    if (up >= v) return false;
                }
            }
        return true;
    }
};

// Sum over semistandard fillings with entries <= m, column by column from the
// left, each column filled top to bottom (strict down a column, weak along a
// row).  Exact; the empty shape contributes 1.
inline Rat loop_schur_eval(const SkewShape& shape, const ParamList& params, bool mirror = false) {
    shape.validate();
    int m = static_cast<int>(params.size());
    int rows = shape.rows();
    if (rows == 0 || shape.cells() == 0) return Rat(1);
    long long cmin = shape.inner[rows - 1] + 1, cmax = shape.outer[0];
    // cells in column-major order
    struct Cell { int r; long long c; };
    std::vector<Cell> cells;
    for (long long c = cmin; c <= cmax; ++c)
        for (int r = 1; r <= rows; ++r)
            if (shape.cell_in(r, c)) cells.push_back({r, c});
    std::map<std::pair<int, long long>, int> fill;
    Rat total(0);
    std::vector<Rat> weights; // running weight per depth
    std::function<void(size_t, Rat)> rec = [&](size_t idx, Rat w) {
        if (idx == cells.size()) {
            total += w;
            return;
        }
        auto [r, c] = cells[idx];
        int lo = 1, hi = m;
        if (shape.cell_in(r, c - 1)) lo = std::max(lo, fill[{r, c - 1}]);
        if (shape.cell_in(r - 1, c)) lo = std::max(lo, fill[{r - 1, c}] + 1);
        long long content = c - r;
        for (int v = lo; v <= hi; ++v) {
            const ParamTuple& t = params[static_cast<size_t>(v - 1)];
            const Rat& coef = mirror ? t.val(-content) : t.val(content);
            if (coef == 0) continue;
            fill[{r, c}] = v;
            rec(idx + 1, w * coef);
        }
        fill.erase({r, c});
    };
    rec(0, Rat(1));
    return total;
}

// loop homogeneous h_r^{(k)}: weakly increasing factor indices i_1<=...<=i_r,
// weight prod_t a^{(i_t)}_{k+t-1}; loop elementary e_r^{(k)}: strictly
// increasing indices.  h_0 = e_0 = 1, negative r gives 0.
inline Rat loop_h(long long r, long long k, const ParamList& params) {
    if (r < 0) return Rat(0);
    if (r == 0) return Rat(1);
    int m = static_cast<int>(params.size());
    // dp[i] = weight sum over length-t prefixes ending with factor index i+1
    std::vector<Rat> dp(m, Rat(0));
    for (int i = 0; i < m; ++i) dp[i] = params[i].val(k);
    for (long long t = 2; t <= r; ++t) {
        std::vector<Rat> nx(m, Rat(0));
        Rat pref(0);
        for (int i = 0; i < m; ++i) {
            pref += dp[i];
            nx[i] = pref * params[i].val(k + t - 1);
        }
        dp = std::move(nx);
    }
    Rat total(0);
    for (const auto& v : dp) total += v;
    return total;
}

inline Rat loop_e(long long r, long long k, const ParamList& params) {
    if (r < 0) return Rat(0);
    if (r == 0) return Rat(1);
    int m = static_cast<int>(params.size());
    if (r > m) return Rat(0);
    std::vector<Rat> dp(m, Rat(0));
    for (int i = 0; i < m; ++i) dp[i] = params[i].val(k);
    for (long long t = 2; t <= r; ++t) {
        std::vector<Rat> nx(m, Rat(0));
        Rat pref(0);
        for (int i = 0; i < m; ++i) {
            nx[i] = pref * params[i].val(k + t - 1);
            pref += dp[i]; // strict: only indices < i contribute
        }
        dp = std::move(nx);
    }
    Rat total(0);
    for (const auto& v : dp) total += v;
    return total;
}

// det(h_{j_t - i_s}^{(i_s)})_{s,t}; equals the tableaux sum over lambda(I,J)
// and the matrix minor of the evaluated curl product.
inline Rat jacobi_trudi_eval(const std::vector<long long>& I, const std::vector<long long>& J,
                             const ParamList& params) {
    size_t k = I.size();
    if (J.size() != k || k == 0) fail("BAD_INPUT", "index sets must have equal size");
    std::vector<std::vector<Rat>> m(k, std::vector<Rat>(k));
    for (size_t s = 0; s < k; ++s)
        for (size_t t = 0; t < k; ++t) m[s][t] = loop_h(J[t] - I[s], I[s], params);
    return dense_det(m);
}

// whirl version: det(e_{j_t - i_s}^{(i_s)}) (mirror loop elementary functions)
inline Rat jacobi_trudi_eval_e(const std::vector<long long>& I, const std::vector<long long>& J,
                               const ParamList& params) {
    size_t k = I.size();
    if (J.size() != k || k == 0) fail("BAD_INPUT", "index sets must have equal size");
    std::vector<std::vector<Rat>> m(k, std::vector<Rat>(k));
    for (size_t s = 0; s < k; ++s)
        for (size_t t = 0; t < k; ++t) m[s][t] = loop_e(J[t] - I[s], I[s], params);
    return dense_det(m);
}

// --------------------------------------------------------------------------
// minor ratio limits (factorization problem)

struct RatioLimit {
    std::vector<Rat> ratios; // Delta_{I,J_h}/Delta_{I_i,J_h} for h = h0..h_max
    std::vector<long long> hs;
    Rat target;              // s_nu(a^{(1)},...,a^{(k)})
};

// I = {i_1 < ... < i_k} with i_t <= i+t; I_i^k = {i+1..i+k}; J_h^k = {h+1..h+k}.
// The ratio Delta_{I,J_h}/Delta_{I_i^k,J_h} of minors of the curl product
// decreases to s_nu evaluated at the first k curls of the ASW factorization,
// nu = (i+k,...,i+k)/(i_k,...,i_1+k-1).
inline RatioLimit minor_ratio_limit(const ParamList& asw_params, const std::vector<long long>& I,
                                    long long i, int k, long long h_max) {
    if (static_cast<int>(I.size()) != k) fail("BAD_INPUT", "|I| must equal k");
    if (k > static_cast<int>(asw_params.size()))
        fail("BAD_INPUT", "k larger than the number of curls");
    for (int t = 1; t <= k; ++t) {
        if (I[t - 1] > i + t) fail("BAD_INPUT", "ratio limit needs i_t <= i+t");
        if (t > 1 && I[t - 2] >= I[t - 1])
            fail("BAD_INPUT", "I must be strictly increasing");
    }
    int n = asw_params.front().n();
    RatioLimit out;
    // target shape nu
    std::vector<long long> outer(k, i + k), inner(k);
    for (int s = 1; s <= k; ++s) inner[s - 1] = I[k - s] + (s - 1);
    ParamList firstk(asw_params.begin(), asw_params.begin() + k);
    out.target = loop_schur_eval(SkewShape(std::move(outer), std::move(inner), n), firstk);
    long long h0 = i;
    for (int t = 1; t <= k; ++t) h0 = std::max(h0, I[t - 1] - t);
    std::vector<long long> Ii(k);
    for (int t = 0; t < k; ++t) Ii[t] = i + 1 + t;
    for (long long h = h0; h <= h_max; ++h) {
        std::vector<long long> Jh(k);
        for (int t = 0; t < k; ++t) Jh[t] = h + 1 + t;
        Rat den = jacobi_trudi_eval(Ii, Jh, asw_params);
        if (den == 0) fail("EMPTY_MINOR", "zero denominator minor at h=" + std::to_string(h));
        out.ratios.push_back(jacobi_trudi_eval(I, Jh, asw_params) / den);
        out.hs.push_back(h);
    }
    return out;
}

struct RecoverResult {
    ParamList params;
    bool converged = false;
    Rat max_step; // componentwise change between h_max-1 and h_max evaluations
};

// Parameter recovery from minor ratios: with L(i,k;h) the ratio
// Delta_{I_{i-1}^k,J_h^k}/Delta_{I_i^k,J_h^k}, the curl parameters of the ASW
// factorization satisfy a_i^{(k)} = lim L(i,k;h) / lim L(i+1,k-1;h).
inline RecoverResult recover_curl_params(const ParamList& asw_params, int k_max, long long h_max,
                                         const Rat& tolerance = Rat(1, 1000000)) {
    int m = static_cast<int>(asw_params.size());
    if (k_max > m) fail("BAD_INPUT", "k_max larger than the number of curls");
    int n = asw_params.front().n();
    auto L = [&](long long i, int k, long long h) -> Rat {
        if (k == 0) return Rat(1);
        std::vector<long long> top(k), bot(k), Jh(k);
        for (int t = 0; t < k; ++t) {
            top[t] = i + t;       // I_{i-1}^k
            bot[t] = i + 1 + t;   // I_i^k
            Jh[t] = h + 1 + t;
        }
        Rat den = jacobi_trudi_eval(bot, Jh, asw_params);
        if (den == 0) fail("EMPTY_MINOR", "zero denominator minor in recovery");
        return jacobi_trudi_eval(top, Jh, asw_params) / den;
    };
    RecoverResult res;
    res.max_step = Rat(0);
    for (int k = 1; k <= k_max; ++k) {
        ParamTuple tup;
        tup.v.resize(n);
        for (int i = 1; i <= n; ++i) {
            Rat cur = L(i, k, h_max) / L(i + 1, k - 1, h_max);
            Rat prev = L(i, k, h_max - 1) / L(i + 1, k - 1, h_max - 1);
            Rat step = cur > prev ? cur - prev : prev - cur;
            if (step > res.max_step) res.max_step = step;
            tup.v[i - 1] = cur;
        }
        res.params.push_back(tup);
    }
    res.converged = res.max_step <= tolerance;
    return res;
}

} // namespace lsym
} // namespace looptnn
