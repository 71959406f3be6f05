#pragma once

#include "looptnn/poly_roots.hpp"
#include "looptnn/positivity.hpp"

namespace looptnn {
namespace factorization {

struct FactorizationResult {
    GeneratorWord word;
    std::optional<PeriodicBandMatrix> residual;
    bool exact = true;
};

namespace detail2 {

inline void scan_nonnegative(const PeriodicBandMatrix& x) {
    for (int i = 1; i <= x.n(); ++i)
        for (int d = x.d_lo(); d <= x.d_hi(); ++d)
            if (x.cell(i, d) < 0)
                fail("NOT_TNN", "negative entry at row " + std::to_string(i) +
                                    " offset " + std::to_string(d));
}

// Repeatedly eliminates special NE corners on the most-NE diagonal with
// Chevalley e's on the left.  Each corner x_{i,j} with x_{i+1,j+1} = 0 is
// cleared by e_i(-x_{i,j}/x_{i+1,j}); specialness keeps the support from
// spilling past the old top diagonal.  Stops when nothing remains above the
// main diagonal.
inline void e_phase(PeriodicBandMatrix& x, std::vector<Atom>& atoms) {
    int n = x.n();
    long long guard = static_cast<long long>(n) * (x.width() + 2) * 4 + 64;
    while (true) {
        x = x.trimmed();
        int d = x.d_hi();
        if (d <= 0) return;
        int pick = -1;
        for (int i = 1; i <= n; ++i)
            if (x.cell(i, d) != 0 && x.cell(x.rep(i + 1), d) == 0) {
                pick = i;
                break;
            }
        if (pick < 0) {
            bool any = false;
            for (int i = 1; i <= n; ++i) any = any || x.cell(i, d) != 0;
            if (!any) { // top diagonal already empty; shrink window
                x = x.with_window(x.d_lo(), d - 1);
                continue;
            }
            fail("DET_NOT_MONOMIAL",
                 "fully nonzero diagonal above the main diagonal: determinant has a "
                 "t-power not removable by Chevalley elimination");
        }
        const Rat num = x.cell(pick, d);
        const Rat piv = x.cell(x.rep(pick + 1), d - 1);
        if (num < 0) fail("NOT_TNN", "negative NE corner");
        if (piv <= 0) fail("NOT_TNN", "nonpositive pivot below a special NE corner");
        Rat c = num / piv;
        x = multiply(chevalley_e(n, pick, -c), x);
        scan_nonnegative(x);
        atoms.push_back(ChevE{pick, c});
        if (--guard < 0) fail("BUDGET_EXCEEDED", "NE elimination did not terminate");
    }
}

// SW mirror with f's.  With stop_on_full_diag the loop ends as soon as the
// most-SW diagonal is fully nonzero (the shift/torus case of the reduction);
// otherwise a fully nonzero strictly-sub diagonal is an error.
inline void f_phase(PeriodicBandMatrix& x, std::vector<Atom>& atoms, bool stop_on_full_diag) {
    int n = x.n();
    long long guard = static_cast<long long>(n) * (x.width() + 2) * 4 + 64;
    while (true) {
        x = x.trimmed();
        int d = x.d_lo();
        bool full = true, any = false;
        for (int i = 1; i <= n; ++i) {
            if (x.cell(i, d) != 0) any = true;
            else full = false;
        }
        if (!any) {
            if (d >= x.d_hi()) return;
            x = x.with_window(d + 1, x.d_hi());
            continue;
        }
        if (full) {
            if (stop_on_full_diag || d == 0) return;
            fail("DET_NOT_MONOMIAL", "fully nonzero sub-diagonal");
        }
        int pick = -1;
        for (int i = 1; i <= n; ++i)
            if (x.cell(i, d) != 0 && x.cell(x.rep(i - 1), d) == 0) {
                pick = i;
                break;
            }
        if (pick < 0) fail("NOT_TNN", "no special SW corner on a partial diagonal");
        const Rat num = x.cell(pick, d);
        const Rat piv = x.cell(x.rep(pick - 1), d + 1);
        if (num < 0) fail("NOT_TNN", "negative SW corner");
        if (piv <= 0) fail("NOT_TNN", "nonpositive pivot above a special SW corner");
        Rat c = num / piv;
        int fk = x.rep(pick - 1);
        x = multiply(chevalley_f(n, fk, -c), x);
        scan_nonnegative(x);
        atoms.push_back(ChevF{fk, c});
        if (--guard < 0) fail("BUDGET_EXCEEDED", "SW elimination did not terminate");
    }
}

} // namespace detail2

// --------------------------------------------------------------------------
// Loewner-Whitney style factorization over the polynomial loop group:
// X = S^s (prod e) (prod f) T with positive parameters.  Requires the folded
// determinant to be a nonzero monomial.
inline GeneratorWord polygen_factor(const PeriodicBandMatrix& x_in) {
    if (!x_in.exact_above()) fail("BAD_INPUT", "polygen_factor needs a finitely supported matrix");
    int n = x_in.n();
    detail2::scan_nonnegative(x_in);
    LaurentPoly det = folded_det(x_in);
    if (det.is_zero()) fail("BAD_INPUT", "singular matrix");
    if (det.coef.size() != 1)
        fail("DET_NOT_MONOMIAL", "folded determinant is not a monomial");
    int s = det.lowest_deg();
    GeneratorWord w(n);
    PeriodicBandMatrix x = x_in;
    if (s != 0) {
        w.atoms.push_back(ShiftPow{s});
        x = multiply(shift_pow(n, -s), x);
    }
    detail2::e_phase(x, w.atoms);
    detail2::f_phase(x, w.atoms, false);
    x = x.trimmed();
    if (x.d_lo() != 0 || x.d_hi() != 0)
        fail("NOT_TNN", "elimination did not reach a diagonal matrix");
    std::vector<Rat> t(n);
    bool unit = true;
    for (int i = 1; i <= n; ++i) {
        t[i - 1] = x.cell(i, 0);
        if (t[i - 1] <= 0) fail("NOT_TNN", "nonpositive torus entry after elimination");
        unit = unit && t[i - 1] == 1;
    }
    if (!unit) w.atoms.push_back(TorusAtom{t});
    return w;
}

// --------------------------------------------------------------------------
// reduction X = F S^k Y with F a product of f's and a positive torus and
// Y upper-unitriangular

struct ReduceResult {
    GeneratorWord f_word; // ChevF atoms followed by a TorusAtom
    int k = 0;
    PeriodicBandMatrix y;
};

inline ReduceResult reduce_lower(const PeriodicBandMatrix& x_in) {
    int n = x_in.n();
    detail2::scan_nonnegative(x_in);
    GeneratorWord f(n);
    PeriodicBandMatrix x = x_in;
    detail2::f_phase(x, f.atoms, true);
    x = x.trimmed();
    int k = x.d_lo();
    PeriodicBandMatrix z = multiply(shift_pow(n, -k), x);
    std::vector<Rat> t(n), tinv(n), tshift(n);
    for (int i = 1; i <= n; ++i) {
        t[i - 1] = z.cell(i, 0);
        if (t[i - 1] <= 0) fail("NOT_TNN", "nonpositive diagonal in the reduction");
        tinv[i - 1] = Rat(1) / t[i - 1];
    }
    PeriodicBandMatrix y = multiply(torus(n, tinv), z);
    // X = (prod f) S^k T Y = (prod f) T' S^k Y with t'_i = t_{i+k}
    for (int i = 1; i <= n; ++i) tshift[i - 1] = t[z.rep(i + k) - 1];
    f.atoms.push_back(TorusAtom{tshift});
    return ReduceResult{f, k, y};
}

// --------------------------------------------------------------------------
// ASW machinery

// Stable bubble sort of curl tuples by non-increasing parameter product using
// eta transpositions; the evaluated product of curls is unchanged.
inline whirl_curl::ParamList asw_sort(const whirl_curl::ParamList& list) {
    for (const auto& t : list)
        if (!t.nonnegative()) fail("BAD_INPUT", "curl parameters must be nonnegative");
    return positivity::sort_curls_desc(list);
}

struct AswStep {
    ParamTuple eps;
    GeneratorWord residual; // curl word with the leading factor removed
};

// Exact ASW step on a curl word: factor out the curl with maximal parameter
// product on the left.
inline AswStep asw_step(const GeneratorWord& w) {
    auto sorted = asw_sort(positivity::curl_tuples_of(w));
    if (sorted.empty()) fail("BAD_INPUT", "empty curl word");
    AswStep r;
    r.eps = sorted.front();
    r.residual = GeneratorWord(w.n);
    for (size_t i = 1; i < sorted.size(); ++i) r.residual.atoms.push_back(CurlAtom{sorted[i]});
    return r;
}

// Window ASW step: X' = M(-eps) X, so that X = N(eps) X'.  The caller supplies
// eps (exact from a word, or an accepted estimate).  X' keeps the window.
inline PeriodicBandMatrix asw_step_window(const PeriodicBandMatrix& x, const ParamTuple& eps) {
    std::vector<Rat> neg(eps.v);
    for (auto& v : neg) v = -v;
    return multiply(whirl(neg), x);
}

// --------------------------------------------------------------------------
// whirl extraction: X = Y M(a) with Y having strictly fewer diagonals

struct WhirlExtract {
    ParamTuple a;
    PeriodicBandMatrix y;
    bool exact = true;
};

namespace detail2 {

// residues and products for the defect equations
//   F_i(a) = sum_{j=0}^{d} (-1)^{d-j} x_{i,i+j} prod_{m=i+j}^{i+d-1} a_m = 0,
// the vanishing of diagonal d of X M(a)^{-1}.
inline Rat defect_product(const std::vector<Rat>& a, long long lo, long long hi) {
    Rat p(1);
    for (long long m = lo; m <= hi; ++m) p *= a[static_cast<size_t>((m - 1) % a.size())];
    return p;
}

inline Rat defect_equation(const PeriodicBandMatrix& x, const std::vector<Rat>& a, int i, int d) {
    Rat acc(0);
    for (int j = 0; j <= d; ++j) {
        const Rat xv = x.at(i, i + j);
        if (xv == 0) continue;
        Rat term = xv * defect_product(a, i + j, i + d - 1);
        if ((d - j) % 2) acc -= term;
        else acc += term;
    }
    return acc;
}

// Y = X M(a)^{-1} restricted to offsets [0, d-1], by the finite convolution
// with N(-a).  Valid whenever the diagonal-d defect equations vanish.
inline PeriodicBandMatrix divide_by_whirl(const PeriodicBandMatrix& x, const std::vector<Rat>& a,
                                          int d) {
    int n = x.n();
    PeriodicBandMatrix y(n, 0, std::max(d - 1, 0), true);
    for (int i = 1; i <= n; ++i)
        for (int s = 0; s <= d - 1; ++s) {
            Rat acc(0);
            for (int j = 0; j <= s; ++j) {
                const Rat xv = x.at(i, i + j);
                if (xv == 0) continue;
                Rat term = xv * defect_product(a, i + j, i + s - 1);
                if ((s - j) % 2) acc -= term;
                else acc += term;
            }
            y.set(i, s, acc);
        }
    return y;
}

inline bool verify_extraction(const PeriodicBandMatrix& x, const std::vector<Rat>& a, int d,
                              PeriodicBandMatrix* y_out) {
    int n = x.n();
    for (const Rat& v : a)
        if (v < 0) return false;
    for (int i = 1; i <= n; ++i)
        if (defect_equation(x, a, i, d) != 0) return false;
    PeriodicBandMatrix y = divide_by_whirl(x, a, d);
    for (int i = 1; i <= n; ++i)
        for (int s = 0; s <= y.d_hi(); ++s)
            if (y.cell(i, s) < 0) return false;
    if (y_out) *y_out = y.trimmed();
    return true;
}

using detail::BigFloat;

inline BigFloat to_f(const Rat& r) {
    return BigFloat(numerator(r).str()) / BigFloat(denominator(r).str());
}

// Newton iteration on the defect equations, high-precision floating point.
inline std::optional<std::vector<BigFloat>> newton_defect(const PeriodicBandMatrix& x, int d,
                                                          std::vector<BigFloat> a, int iters) {
    int n = x.n();
    auto prod_over = [&](int i, int j) {
        BigFloat p(1);
        for (long long m = i + j; m <= static_cast<long long>(i) + d - 1; ++m)
            p *= a[static_cast<size_t>((m - 1) % n)];
        return p;
    };
    for (int it = 0; it < iters; ++it) {
        std::vector<std::vector<BigFloat>> J(n, std::vector<BigFloat>(n, BigFloat(0)));
        std::vector<BigFloat> F(n, BigFloat(0));
        for (int i = 1; i <= n; ++i) {
            for (int j = 0; j <= d; ++j) {
                Rat xv = x.at(i, i + j);
                if (xv == 0) continue;
                BigFloat sign = ((d - j) % 2) ? BigFloat(-1) : BigFloat(1);
                BigFloat coef = sign * to_f(xv);
                F[i - 1] += coef * prod_over(i, j);
                for (int r = 0; r < n; ++r) {
                    // derivative of the product wrt a_r
                    BigFloat dp(0);
                    BigFloat partial(1);
                    int cnt = 0;
                    for (long long m = i + j; m <= static_cast<long long>(i) + d - 1; ++m) {
                        int rep = static_cast<int>(((m - 1) % n + n) % n);
                        if (rep == r) ++cnt;
                        else partial *= a[rep];
                    }
                    if (cnt > 0) {
                        BigFloat apow(1);
                        for (int c = 0; c < cnt - 1; ++c) apow *= a[r];
                        dp = BigFloat(cnt) * apow * partial;
                    }
                    J[i - 1][r] += coef * dp;
                }
            }
        }
        BigFloat fn(0);
        for (auto& v : F) fn += abs(v);
        if (fn < BigFloat("1e-70")) return a;
        // solve J delta = F
        std::vector<BigFloat> delta(n, BigFloat(0));
        {
            auto A = J;
            auto b = F;
            for (int c = 0; c < n; ++c) {
                int piv = -1;
                BigFloat best(0);
                for (int r = c; r < n; ++r)
                    if (abs(A[r][c]) > best) { best = abs(A[r][c]); piv = r; }
                if (piv < 0 || best == 0) return std::nullopt;
                std::swap(A[piv], A[c]);
                std::swap(b[piv], b[c]);
                for (int r = c + 1; r < n; ++r) {
                    BigFloat f = A[r][c] / A[c][c];
                    for (int cc = c; cc < n; ++cc) A[r][cc] -= f * A[c][cc];
                    b[r] -= f * b[c];
                }
            }
            for (int r = n - 1; r >= 0; --r) {
                BigFloat acc = b[r];
                for (int cc = r + 1; cc < n; ++cc) acc -= A[r][cc] * delta[cc];
                delta[r] = acc / A[r][r];
            }
        }
        for (int r = 0; r < n; ++r) a[r] -= delta[r];
    }
    return std::nullopt;
}

} // namespace detail2

// Extracts the rightmost whirl factor: a solves the vanishing of diagonal d of
// X M(a)^{-1}; the exact route reads the tuple off the adjugate of the folded
// twisted matrix at a rational root of the folded determinant, preferring the
// root with the largest parameter product (the ASW choice).  When no rational
// root admits an exact nonnegative solution, a Newton iteration seeded with
// the estimated epsilon-sequence of X^{-c} is rationalized by continued
// fractions (denominator bound max_den) and verified; failing exact
// verification the rationalized solution is returned flagged inexact.
inline WhirlExtract whirl_extract(const PeriodicBandMatrix& x_in,
                                  const BigInt& max_den = BigInt(1000000)) {
    if (!x_in.exact_above()) fail("BAD_INPUT", "whirl_extract needs a finitely supported matrix");
    if (!x_in.is_upper_unitriangular())
        fail("BAD_INPUT", "whirl_extract needs an upper-unitriangular matrix");
    PeriodicBandMatrix x = x_in.trimmed();
    int n = x.n(), d = x.d_hi();
    if (d < 1) fail("BAD_INPUT", "matrix has no diagonals above the main one");
    LaurentPoly p = folded_det(x);
    if (p.highest_deg() < 1) fail("BAD_INPUT", "whirl_extract needs a non-constant folded determinant");
    // g(u) = p((-1)^n u) has roots u = 1/b over the whirl factor products b
    detail::QPoly g(p.highest_deg() + 1, Rat(0));
    for (const auto& [k, c] : p.coef) g[k] = (n % 2 == 1 && k % 2 != 0) ? -c : c;
    auto roots = detail::positive_rational_roots(g);
    std::vector<Rat> bs;
    for (auto& [u, mult] : roots) bs.push_back(Rat(1) / u);
    std::sort(bs.begin(), bs.end(), std::greater<Rat>());
    LaurentMatrix fc = fold(c_transform(x));
    for (const Rat& b : bs) {
        Rat u0 = Rat(1) / b;
        // evaluate folded X^c at t = u0
        std::vector<std::vector<Rat>> mc(n, std::vector<Rat>(n, Rat(0)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Rat acc(0);
                for (const auto& [k, c] : fc.entries[i][j].coef) {
                    Rat pw(1);
                    for (int t = 0; t < std::abs(k); ++t) {
                        if (k > 0) pw *= u0;
                        else pw /= u0;
                    }
                    acc += c * pw;
                }
                mc[i][j] = acc;
            }
        // adjugate columns: adj_{i,l} = (-1)^{i+l} det(mc minus row l, col i)
        auto cofactor = [&](int l, int i) {
            std::vector<std::vector<Rat>> sub;
            for (int r = 0; r < n; ++r) {
                if (r == l) continue;
                std::vector<Rat> row;
                for (int c = 0; c < n; ++c)
                    if (c != i) row.push_back(mc[r][c]);
                sub.push_back(row);
            }
            Rat v = n == 1 ? Rat(1) : dense_det(sub);
            return ((i + l) % 2) ? -v : v;
        };
        for (int l = 0; l < n; ++l) {
            std::vector<Rat> u(n);
            bool ok = true;
            for (int i = 0; i < n && ok; ++i) {
                u[i] = cofactor(l, i);
                if (u[i] == 0) ok = false;
            }
            if (!ok) continue;
            std::vector<Rat> a(n);
            for (int i = 0; i < n - 1; ++i) a[i] = u[i] / u[i + 1];
            a[n - 1] = b * u[n - 1] / u[0];
            PeriodicBandMatrix y;
            if (detail2::verify_extraction(x, a, d, &y))
                return WhirlExtract{ParamTuple(a), y, true};
        }
    }
    // Newton fallback, seeded with the estimated epsilon of X^{-c}
    int window = std::max(3 * n, 2 * d) + 16;
    auto est = positivity::epsilon_estimate(c_inverse(x, window));
    std::vector<detail::BigFloat> seed(n);
    for (int i = 0; i < n; ++i) seed[i] = detail2::to_f(est.intervals[i].second);
    auto sol = detail2::newton_defect(x, d, seed, 400);
    if (!sol) {
        // one retry from a perturbed seed
        for (auto& s : seed) s = s * detail::BigFloat("1.125") + detail::BigFloat("0.01");
        sol = detail2::newton_defect(x, d, seed, 400);
    }
    if (!sol) fail("NO_EXTRACTION", "Newton iteration did not converge");
    for (const BigInt& den : {max_den, BigInt("1000000000000"), BigInt("1000000000000000000")}) {
        std::vector<Rat> a(n);
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            auto r = detail::rationalize((*sol)[i], den);
            if (!r || *r < 0) ok = false;
            else a[i] = *r;
        }
        if (!ok) continue;
        PeriodicBandMatrix y;
        if (detail2::verify_extraction(x, a, d, &y)) return WhirlExtract{ParamTuple(a), y, true};
    }
    // no exact rational solution: return the best rationalization, flagged
    std::vector<Rat> a(n);
    for (int i = 0; i < n; ++i) {
        auto r = detail::rationalize((*sol)[i], max_den);
        if (!r) fail("NO_EXTRACTION", "solution not representable");
        a[i] = *r < 0 ? Rat(0) : *r;
    }
    return WhirlExtract{ParamTuple(a), detail2::divide_by_whirl(x, a, d).trimmed(), false};
}

// --------------------------------------------------------------------------
// finite-support factorization into whirls and Chevalley e's

inline FactorizationResult finite_factor(const PeriodicBandMatrix& x_in) {
    if (!x_in.exact_above()) fail("BAD_INPUT", "finite_factor needs a finitely supported matrix");
    if (!x_in.is_upper_unitriangular())
        fail("BAD_INPUT", "finite_factor needs an upper-unitriangular matrix");
    detail2::scan_nonnegative(x_in);
    PeriodicBandMatrix x = x_in.trimmed();
    int n = x.n();
    std::vector<ParamTuple> whirls; // in extraction order (rightmost first)
    bool exact = true;
    long long guard = folded_det(x).highest_deg() + 4;
    while (folded_det(x).highest_deg() >= 1) {
        WhirlExtract we = whirl_extract(x);
        exact = exact && we.exact;
        whirls.push_back(we.a);
        x = we.y;
        if (--guard < 0) fail("BUDGET_EXCEEDED", "whirl extraction did not reduce the determinant");
    }
    GeneratorWord w(n);
    detail2::e_phase(x, w.atoms); // constant-determinant part: Chevalley e's
    x = x.trimmed();
    if (x != PeriodicBandMatrix::identity(n))
        fail("NOT_TNN", "residual after Chevalley elimination is not the identity");
    for (auto it = whirls.rbegin(); it != whirls.rend(); ++it)
        w.atoms.push_back(WhirlAtom{*it});
    return FactorizationResult{w, std::nullopt, exact};
}

} // namespace factorization

namespace positivity {

// Two-tier TNN decision for finitely supported matrices: constructive
// factorization certifies, an explicit negative minor refutes.
inline TnnVerdict certify_tnn(const PeriodicBandMatrix& x) {
    if (!x.exact_above()) fail("BAD_INPUT", "certify_tnn needs a finitely supported matrix");
    auto refute = [&]() -> TnnVerdict {
        auto w = find_negative_minor(x);
        if (!w) fail("NOT_TNN", "factorization failed but no small negative minor found");
        return TnnVerdict{TnnStatus::REFUTED, w, std::nullopt};
    };
    try {
        LaurentPoly det = folded_det(x);
        if (det.is_zero()) fail("BAD_INPUT", "singular matrix");
        GeneratorWord w(x.n());
        if (det.coef.size() == 1) {
            w = factorization::polygen_factor(x);
        } else {
            auto red = factorization::reduce_lower(x);
            auto ff = factorization::finite_factor(red.y);
            if (!ff.exact) fail("NOT_TNN", "inexact factorization");
            w = red.f_word;
            if (red.k != 0) w.atoms.push_back(ShiftPow{red.k});
            for (const auto& a : ff.word.atoms) w.atoms.push_back(a);
        }
        if (evaluate(w) != x.trimmed())
            fail("INTERNAL", "certificate does not re-multiply to the input");
        return TnnVerdict{TnnStatus::CERTIFIED, std::nullopt, w};
    } catch (const domain_error& e) {
        if (e.code() == "NOT_TNN" || e.code() == "DET_NOT_MONOMIAL" ||
            e.code() == "NO_EXTRACTION")
            return refute();
        throw;
    }
}

} // namespace positivity
} // namespace looptnn
