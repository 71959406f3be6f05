#pragma once

#include <numeric>

#include "looptnn/word.hpp"

namespace looptnn {
namespace whirl_curl {

// kappa_i(a,b) = sum_{j=i}^{i+n-1} prod_{k=i+1}^{j} b_k prod_{k=j+1}^{i+n-1} a_k
inline Rat kappa(const ParamTuple& a, const ParamTuple& b, long long i) {
    if (a.n() != b.n()) fail("BAD_INPUT", "kappa needs tuples of equal size");
    int n = a.n();
    Rat sum(0);
    for (long long j = i; j <= i + n - 1; ++j) {
        Rat term(1);
        for (long long k = i + 1; k <= j; ++k) term *= b.val(k);
        for (long long k = j + 1; k <= i + n - 1; ++k) term *= a.val(k);
        sum += term;
    }
    return sum;
}

// The whirl commutation map: eta(a,b) = (b',a') with
//   b'_i = b_{i+1} kappa_{i+1} / kappa_i,   a'_i = a_{i-1} kappa_{i-1} / kappa_i,
// so that M(a)M(b) = M(b')M(a') and N(b)N(a) = N(a')N(b').
inline std::pair<ParamTuple, ParamTuple> eta(const ParamTuple& a, const ParamTuple& b) {
    int n = a.n();
    if (b.n() != n) fail("BAD_INPUT", "eta needs tuples of equal size");
    std::vector<Rat> kap(n);
    for (int i = 1; i <= n; ++i) {
        kap[i - 1] = kappa(a, b, i);
        if (kap[i - 1] == 0)
            fail("INADMISSIBLE_ETA", "kappa_" + std::to_string(i) + " vanishes");
    }
    auto k = [&](long long i) -> const Rat& {
        long long r = (i - 1) % n;
        if (r < 0) r += n;
        return kap[static_cast<size_t>(r)];
    };
    ParamTuple bp, ap;
    bp.v.resize(n);
    ap.v.resize(n);
    for (int i = 1; i <= n; ++i) {
        bp.v[i - 1] = b.val(i + 1) * k(i + 1) / k(i);
        ap.v[i - 1] = a.val(i - 1) * k(i - 1) / k(i);
    }
    return {bp, ap};
}

// theta(a,b) = (b',a') with M(a)N(b) = N(b')M(a'):
//   b'_i = (a_i+b_i) b_{i+1} / (a_{i+1}+b_{i+1}),  a'_i likewise with a_{i+1}.
inline std::pair<ParamTuple, ParamTuple> theta(const ParamTuple& a, const ParamTuple& b) {
    int n = a.n();
    if (b.n() != n) fail("BAD_INPUT", "theta needs tuples of equal size");
    ParamTuple bp, ap;
    bp.v.resize(n);
    ap.v.resize(n);
    for (int i = 1; i <= n; ++i) {
        Rat den = a.val(i + 1) + b.val(i + 1);
        if (den == 0) fail("INADMISSIBLE_ETA", "theta denominator a+b vanishes");
        Rat num = a.val(i) + b.val(i);
        bp.v[i - 1] = num * b.val(i + 1) / den;
        ap.v[i - 1] = num * a.val(i + 1) / den;
    }
    return {bp, ap};
}

// inverse map: indices shifted by -1 instead of +1
inline std::pair<ParamTuple, ParamTuple> theta_inverse(const ParamTuple& a, const ParamTuple& b) {
    int n = a.n();
    ParamTuple bp, ap;
    bp.v.resize(n);
    ap.v.resize(n);
    for (int i = 1; i <= n; ++i) {
        Rat den = a.val(i - 1) + b.val(i - 1);
        if (den == 0) fail("INADMISSIBLE_ETA", "theta denominator a+b vanishes");
        Rat num = a.val(i) + b.val(i);
        bp.v[i - 1] = num * b.val(i - 1) / den;
        ap.v[i - 1] = num * a.val(i - 1) / den;
    }
    return {bp, ap};
}

// Adjacent swap on a list of curl tuples preserving N(L_1) N(L_2) ... N(L_m):
//   N(u)N(v) = N(v')N(u') where eta(v,u) = (u',v').
// The swapped pair carries the products (prod v, prod u) in exchanged order.
inline void curl_swap(ParamTuple& u, ParamTuple& v) {
    auto [up, vp] = eta(v, u);
    u = vp;
    v = up;
}

// Adjacent swap preserving the whirl product M(L_1)...M(L_m):
//   M(u)M(v) = M(v')M(u') where eta(u,v) = (v',u').
inline void whirl_swap(ParamTuple& u, ParamTuple& v) {
    auto [vp, up] = eta(u, v);
    u = vp;
    v = up;
}

using ParamList = std::vector<ParamTuple>;

// The S_k action on lists of curl tuples: eta_i applied in sequence.
// Each eta_i exchanges positions (i, i+1) so that the curl product
// N(L_1)...N(L_k) is preserved exactly.  1-based positions.
inline ParamList apply_eta_word(const std::vector<int>& word, ParamList list) {
    for (size_t step = 0; step < word.size(); ++step) {
        int i = word[step];
        if (i < 1 || i + 1 > static_cast<int>(list.size()))
            fail("BAD_INPUT", "eta index out of range at position " + std::to_string(step));
        try {
            curl_swap(list[i - 1], list[i]);
        } catch (const domain_error& e) {
            fail("INADMISSIBLE_ETA",
                 "inadmissible pair at word position " + std::to_string(step));
        }
    }
    return list;
}

// One absorption step and the full absorb operation.
//
// Passing e_k(a) from the left through a whirl M(b) gives
//   e_k(a) M(b) = M(b') e_{k+1}(a')   (eta with a degenerate first tuple),
// and through a curl N(b) gives
//   e_k(a) N(b) = N(b') e_{k-1}(a')   (theta, same degenerate tuple).
struct AbsorbStep {
    ParamTuple tuple; // the modified whirl/curl tuple
    int k;            // residual Chevalley index after this step
    Rat a;            // residual Chevalley parameter after this step
};

struct AbsorbResult {
    ParamList tuples;            // modified list
    int k;                       // final residual index
    Rat a;                       // final residual parameter
    std::vector<AbsorbStep> steps;
};

enum class TupleKind { Whirl, Curl };

inline AbsorbResult absorb_chevalley(TupleKind kind, int k, const Rat& a0,
                                     const ParamList& list) {
    if (list.empty()) return {list, k, a0, {}};
    int n = list.front().n();
    AbsorbResult res;
    res.tuples.reserve(list.size());
    int cur_k = ((k - 1) % n + n) % n + 1;
    Rat cur_a = a0;
    for (const auto& b : list) {
        ParamTuple deg;
        deg.v.assign(n, Rat(0));
        deg.v[cur_k - 1] = cur_a;
        ParamTuple bp, ap;
        if (kind == TupleKind::Whirl) {
            std::tie(bp, ap) = eta(deg, b);
            cur_k = cur_k % n + 1;
        } else {
            std::tie(bp, ap) = theta(deg, b);
            cur_k = (cur_k - 2 + n) % n + 1;
        }
        cur_a = ap.val(cur_k);
        // ap must be supported at cur_k only
        for (int i = 1; i <= n; ++i)
            if (i != cur_k && ap.val(i) != 0)
                fail("INADMISSIBLE_ETA", "residual tuple not a Chevalley atom");
        res.tuples.push_back(bp);
        res.steps.push_back({bp, cur_k, cur_a});
    }
    res.k = cur_k;
    res.a = cur_a;
    return res;
}

// A degenerate whirl factors into Chevalley generators: for each maximal
// cyclic run a_i,...,a_j of nonzero parameters the factor is
// e_j(a_j) e_{j-1}(a_{j-1}) ... e_i(a_i); runs ordered by start index.
// (Within a run the higher index must come first for the product to carry no
// second-diagonal terms; distinct runs commute.)
inline GeneratorWord degenerate_whirl_to_word(const ParamTuple& a) {
    if (!a.degenerate()) fail("BAD_INPUT", "whirl is not degenerate");
    int n = a.n();
    GeneratorWord w(n);
    std::vector<bool> in_run(n, false);
    for (int start = 1; start <= n; ++start) {
        if (a.val(start) == 0 || a.val(start - 1) != 0) continue;
        // start of a maximal cyclic run
        int len = 0;
        while (len < n && a.val(start + len) != 0) ++len;
        for (int t = len - 1; t >= 0; --t) {
            long long idx = start + t;
            int rep = static_cast<int>((idx - 1) % n) + 1;
            w.atoms.push_back(ChevE{rep, a.val(idx)});
        }
    }
    return w;
}

} // namespace whirl_curl
} // namespace looptnn
