#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <vector>

#include "looptnn/laurent.hpp"
#include "looptnn/rational.hpp"

namespace looptnn {

// A doubly-infinite Z-periodic matrix X with x_{i+n,j+n} = x_{i,j}, stored by
// diagonals: representative rows i in {1..n}, offsets d = j-i in [d_lo,d_hi].
// Diagonals below d_lo are identically zero.  If exact_above is set, the
// diagonals above d_hi are identically zero too (finitely supported matrix);
// otherwise they are unknown and the matrix is a truncated window.
class PeriodicBandMatrix {
public:
    PeriodicBandMatrix() = default;
    PeriodicBandMatrix(int n, int d_lo, int d_hi, bool exact_above)
        : n_(n), d_lo_(d_lo), d_hi_(d_hi), exact_above_(exact_above),
          data_(static_cast<size_t>(n) * width(), Rat(0)) {
        if (n <= 0) fail("BAD_INPUT", "period n must be positive");
        if (d_lo > d_hi) fail("BAD_INPUT", "d_lo > d_hi");
    }

    static PeriodicBandMatrix identity(int n) {
        PeriodicBandMatrix m(n, 0, 0, true);
        for (int i = 1; i <= n; ++i) m.set(i, 0, Rat(1));
        return m;
    }

    int n() const { return n_; }
    int d_lo() const { return d_lo_; }
    int d_hi() const { return d_hi_; }
    bool exact_above() const { return exact_above_; }
    int width() const { return d_hi_ - d_lo_ + 1; }

    // representative of i in {1..n}
    int rep(long long i) const {
        long long r = (i - 1) % n_;
        if (r < 0) r += n_;
        return static_cast<int>(r) + 1;
    }

    bool known_offset(int d) const { return d <= d_hi_ || exact_above_; }

    // entry by representative row and offset
    const Rat& cell(int i, int d) const {
        return data_[static_cast<size_t>(i - 1) * width() + (d - d_lo_)];
    }
    void set(int i, int d, const Rat& v) {
        data_[static_cast<size_t>(i - 1) * width() + (d - d_lo_)] = v;
    }

    // entry x_{i,j} for arbitrary integer indices
    Rat at(long long i, long long j) const {
        long long d = j - i;
        if (d < d_lo_) return Rat(0);
        if (d > d_hi_) {
            if (exact_above_) return Rat(0);
            fail("WINDOW", "entry (" + std::to_string(i) + "," + std::to_string(j) +
                               ") beyond truncated window");
        }
        return cell(rep(i), static_cast<int>(d));
    }

    bool is_upper_unitriangular() const {
        if (d_lo_ < 0)
            for (int i = 1; i <= n_; ++i)
                for (int d = d_lo_; d < 0; ++d)
                    if (cell(i, d) != 0) return false;
        if (d_lo_ > 0) return false;
        for (int i = 1; i <= n_; ++i)
            if (cell(i, 0) != 1) return false;
        return true;
    }

    // Drop identically-zero boundary diagonals (keeps at least offset 0).
    PeriodicBandMatrix trimmed() const {
        int lo = d_lo_, hi = d_hi_;
        auto diag_zero = [&](int d) {
            for (int i = 1; i <= n_; ++i)
                if (cell(i, d) != 0) return false;
            return true;
        };
        while (lo < hi && lo < 0 && diag_zero(lo)) ++lo;
        while (hi > lo && hi > 0 && diag_zero(hi)) --hi;
        if (lo > 0 && diag_zero(hi) && hi == lo) { /* zero matrix: keep single diag */ }
        PeriodicBandMatrix r(n_, lo, hi, exact_above_);
        for (int i = 1; i <= n_; ++i)
            for (int d = lo; d <= hi; ++d) r.set(i, d, cell(i, d));
        return r;
    }

    // restrict / extend the stored window (extension only when exact_above)
    PeriodicBandMatrix with_window(int lo, int hi) const {
        if (!exact_above_ && (hi > d_hi_))
            fail("WINDOW", "cannot extend truncated matrix window");
        PeriodicBandMatrix r(n_, lo, hi, exact_above_);
        for (int i = 1; i <= n_; ++i)
            for (int d = std::max(lo, d_lo_); d <= std::min(hi, d_hi_); ++d)
                r.set(i, d, cell(i, d));
        return r;
    }

private:
    int n_ = 1;
    int d_lo_ = 0, d_hi_ = 0;
    bool exact_above_ = true;
    std::vector<Rat> data_;
};

// Exact equality of periodic matrices (zero-padding ignored; a truncated and
// an exact matrix are never equal).
inline bool operator==(const PeriodicBandMatrix& a, const PeriodicBandMatrix& b) {
    if (a.n() != b.n() || a.exact_above() != b.exact_above()) return false;
    if (!a.exact_above() && a.d_hi() != b.d_hi()) return false;
    int lo = std::min(a.d_lo(), b.d_lo());
    int hi = std::max(a.d_hi(), b.d_hi());
    if (!a.exact_above()) hi = a.d_hi();
    for (int i = 1; i <= a.n(); ++i)
        for (int d = lo; d <= hi; ++d) {
            Rat va = (d < a.d_lo() || d > a.d_hi()) ? Rat(0) : a.cell(i, d);
            Rat vb = (d < b.d_lo() || d > b.d_hi()) ? Rat(0) : b.cell(i, d);
            if (va != vb) return false;
        }
    return true;
}
inline bool operator!=(const PeriodicBandMatrix& a, const PeriodicBandMatrix& b) {
    return !(a == b);
}

inline bool equal_on_window(const PeriodicBandMatrix& a, const PeriodicBandMatrix& b,
                            int lo, int hi) {
    if (a.n() != b.n()) return false;
    for (int i = 1; i <= a.n(); ++i)
        for (int d = lo; d <= hi; ++d)
            if (a.at(i, i + d) != b.at(i, i + d)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// generators

inline PeriodicBandMatrix chevalley_e(int n, int k, const Rat& a) {
    PeriodicBandMatrix m(n, 0, 1, true);
    for (int i = 1; i <= n; ++i) m.set(i, 0, Rat(1));
    m.set(m.rep(k), 1, a);
    return m;
}

inline PeriodicBandMatrix chevalley_f(int n, int k, const Rat& a) {
    PeriodicBandMatrix m(n, -1, 0, true);
    for (int i = 1; i <= n; ++i) m.set(i, 0, Rat(1));
    m.set(m.rep(k + 1), -1, a); // f_k is the transpose of e_k: entry (k+1, k)
    return m;
}

inline PeriodicBandMatrix shift_pow(int n, int k) {
    PeriodicBandMatrix m(n, k, k, true);
    for (int i = 1; i <= n; ++i) m.set(i, k, Rat(1));
    return m;
}

inline PeriodicBandMatrix torus(int n, const std::vector<Rat>& d) {
    if (static_cast<int>(d.size()) != n) fail("BAD_INPUT", "torus needs n entries");
    PeriodicBandMatrix m(n, 0, 0, true);
    for (int i = 1; i <= n; ++i) {
        if (d[i - 1] <= 0) fail("BAD_INPUT", "torus entries must be positive");
        m.set(i, 0, d[i - 1]);
    }
    return m;
}

// whirl M(a_1..a_n): unit diagonal, superdiagonal a_i
inline PeriodicBandMatrix whirl(const std::vector<Rat>& a) {
    int n = static_cast<int>(a.size());
    PeriodicBandMatrix m(n, 0, 1, true);
    for (int i = 1; i <= n; ++i) {
        m.set(i, 0, Rat(1));
        m.set(i, 1, a[i - 1]);
    }
    return m;
}

// curl N(b) = M(b)^{-c}: entries prod_{m=i}^{j-1} b_m.  Infinitely supported
// unless some b_m = 0, so a window must be supplied; the result is exact iff
// the parameter tuple is degenerate and the support fits.
inline PeriodicBandMatrix curl(const std::vector<Rat>& b, int d_hi) {
    int n = static_cast<int>(b.size());
    bool degenerate = std::any_of(b.begin(), b.end(), [](const Rat& x) { return x == 0; });
    int hi = d_hi;
    bool exact = false;
    if (degenerate) {
        // support is bounded by the longest cyclic run of nonzero parameters
        int maxrun = 0;
        for (int i = 0; i < n; ++i) {
            int run = 0;
            while (run < n && b[(i + run) % n] != 0) ++run;
            maxrun = std::max(maxrun, run);
        }
        if (d_hi >= maxrun) {
            hi = std::max(maxrun, 0);
            exact = true;
        }
    }
    if (hi < 0) fail("WINDOW", "curl window must be nonnegative");
    PeriodicBandMatrix m(n, 0, std::max(hi, 0), exact);
    for (int i = 1; i <= n; ++i) {
        Rat prod(1);
        m.set(i, 0, Rat(1));
        for (int d = 1; d <= hi; ++d) {
            prod *= b[(i - 1 + d - 1) % n];
            m.set(i, d, prod);
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// multiplication

// Band convolution.  The result window is the largest range that is exactly
// determined by the stored windows of the factors; multiplying a truncated
// matrix by anything with negative offsets shrinks it, and the operation fails
// if nothing at all would remain exact.
inline PeriodicBandMatrix multiply(const PeriodicBandMatrix& x, const PeriodicBandMatrix& y) {
    if (x.n() != y.n()) fail("BAD_INPUT", "period mismatch in multiply");
    int n = x.n();
    bool ea = x.exact_above() && y.exact_above();
    long long hi;
    if (ea) {
        hi = static_cast<long long>(x.d_hi()) + y.d_hi();
    } else {
        hi = std::numeric_limits<long long>::max();
        if (!x.exact_above()) hi = std::min(hi, static_cast<long long>(x.d_hi()) + y.d_lo());
        if (!y.exact_above()) hi = std::min(hi, static_cast<long long>(y.d_hi()) + x.d_lo());
        hi = std::min(hi, static_cast<long long>(x.d_hi()) + y.d_hi());
    }
    long long lo = static_cast<long long>(x.d_lo()) + y.d_lo();
    if (hi < lo)
        fail("INCOMPATIBLE_TRUNCATION",
             "truncated factor with negative offsets leaves no exact window");
    PeriodicBandMatrix z(n, static_cast<int>(lo), static_cast<int>(hi), ea);
    for (int i = 1; i <= n; ++i)
        for (int d = static_cast<int>(lo); d <= static_cast<int>(hi); ++d) {
            Rat acc(0);
            int dx_lo = std::max(x.d_lo(), d - y.d_hi());
            int dx_hi = std::min(x.d_hi(), d - y.d_lo());
            for (int dx = dx_lo; dx <= dx_hi; ++dx) {
                const Rat& xv = x.cell(i, dx);
                if (xv == 0) continue;
                acc += xv * y.cell(y.rep(i + dx), d - dx);
            }
            z.set(i, d, acc);
        }
    return z;
}

// ---------------------------------------------------------------------------
// minors

// Determinant of a dense rational matrix by Gaussian elimination.
inline Rat dense_det(std::vector<std::vector<Rat>> m) {
    int k = static_cast<int>(m.size());
    Rat det(1);
    for (int c = 0; c < k; ++c) {
        int piv = -1;
        for (int r = c; r < k; ++r)
            if (m[r][c] != 0) { piv = r; break; }
        if (piv < 0) return Rat(0);
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        Rat inv = Rat(1) / m[c][c];
        for (int r = c + 1; r < k; ++r) {
            if (m[r][c] == 0) continue;
            Rat f = m[r][c] * inv;
            for (int cc = c; cc < k; ++cc) m[r][cc] -= f * m[c][cc];
        }
    }
    return det;
}

inline std::vector<std::vector<Rat>> submatrix(const PeriodicBandMatrix& x,
                                               const std::vector<long long>& I,
                                               const std::vector<long long>& J) {
    std::vector<std::vector<Rat>> m(I.size(), std::vector<Rat>(J.size()));
    for (size_t r = 0; r < I.size(); ++r)
        for (size_t c = 0; c < J.size(); ++c) m[r][c] = x.at(I[r], J[c]);
    return m;
}

// Delta_{I,J}(X), exact.  Throws WINDOW if a needed entry is not determined.
inline Rat minor_det(const PeriodicBandMatrix& x, const std::vector<long long>& I,
                     const std::vector<long long>& J) {
    if (I.size() != J.size()) fail("BAD_INPUT", "minor needs |I| = |J|");
    return dense_det(submatrix(x, I, J));
}

// ---------------------------------------------------------------------------
// fold / unfold

// a_{ij}(t) = sum_k x_{i,j+kn} t^k
inline LaurentMatrix fold(const PeriodicBandMatrix& x, std::optional<int> T = std::nullopt) {
    int n = x.n();
    LaurentMatrix a(n);
    std::optional<int> trunc;
    if (!x.exact_above()) {
        // coefficient k of entry (i,j) needs offset j-i+kn <= d_hi;
        // the worst entry determines the exactly-known order.
        int kmax = (x.d_hi() - (n - 1) >= 0) ? (x.d_hi() - (n - 1)) / n
                                             : -(((n - 1) - x.d_hi()) + n - 1) / n;
        if (!T) T = kmax;
        if (*T > kmax)
            fail("WINDOW", "requested truncation order beyond stored window");
        trunc = T;
    }
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            LaurentPoly p;
            p.trunc = trunc;
            // offsets j - i + k n within window
            for (int d = x.d_lo(); d <= x.d_hi(); ++d) {
                int diff = d - (j - i);
                if (diff % n != 0) continue;
                int k = diff / n;
                if (trunc && k > *trunc) continue;
                const Rat& v = x.cell(i, d);
                if (v != 0) p.coef[k] = v;
            }
            a.entries[i - 1][j - 1] = p;
        }
    a.trunc = trunc;
    return a;
}

// Inverse of fold on the stored window.
inline PeriodicBandMatrix unfold(const LaurentMatrix& a, int d_hi) {
    int n = a.n;
    if (n <= 0) fail("BAD_INPUT", "empty Laurent matrix");
    int lo = 0, needed_hi = 0;
    bool any = false;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            const LaurentPoly& p = a.entries[i - 1][j - 1];
            if (p.is_zero()) continue;
            int dl = j - i + n * p.lowest_deg();
            int dh = j - i + n * p.highest_deg();
            lo = any ? std::min(lo, dl) : dl;
            needed_hi = any ? std::max(needed_hi, dh) : dh;
            any = true;
        }
    if (!any) { lo = 0; needed_hi = 0; }
    if (d_hi < lo) fail("WINDOW", "window smaller than the lowest Laurent degree");
    bool exact = !a.trunc && needed_hi <= d_hi;
    if (a.trunc) {
        // entries are known only up to order trunc: offsets beyond
        // n*trunc + (1-n) are not determined by the series
        int safe = n * (*a.trunc) + (1 - n);
        if (d_hi > safe) fail("WINDOW", "window beyond series truncation order");
    }
    PeriodicBandMatrix x(n, lo, d_hi, exact);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            for (const auto& [k, c] : a.entries[i - 1][j - 1].coef) {
                int d = j - i + n * k;
                if (d >= lo && d <= d_hi) x.set(i, d, c);
            }
    return x;
}

// ---------------------------------------------------------------------------
// the sign twist and its inverse composition

// X^c: x_{i,j} -> (-1)^{|i-j|} x_{i,j}
inline PeriodicBandMatrix c_transform(const PeriodicBandMatrix& x) {
    PeriodicBandMatrix r = x;
    for (int i = 1; i <= x.n(); ++i)
        for (int d = x.d_lo(); d <= x.d_hi(); ++d)
            if (d % 2 != 0) r.set(i, d, -x.cell(i, d));
    return r;
}

// folded determinant det(ol X(t)); exact Laurent polynomial when the matrix is
// finitely supported, truncated series (to order T) otherwise.
inline LaurentPoly folded_det(const PeriodicBandMatrix& x, std::optional<int> T = std::nullopt) {
    return laurent_det(fold(x, T));
}

// X^{-c} = (X^c)^{-1} for upper-unitriangular X, diagonal by diagonal:
//   Y_{i,i+d} = -sum_{m=1}^{d} W_{i,i+m} Y_{i+m,i+d},  W = X^c.
// For finitely supported X with constant folded determinant the result is
// finitely supported and returned exact; otherwise it is a truncated window.
inline PeriodicBandMatrix c_inverse(const PeriodicBandMatrix& x, int want_hi = -1) {
    if (!x.is_upper_unitriangular())
        fail("BAD_INPUT", "c_inverse requires an upper-unitriangular matrix");
    int n = x.n();
    PeriodicBandMatrix w = c_transform(x.trimmed());
    bool exact_result = false;
    int out_hi;
    if (x.exact_above()) {
        LaurentPoly det = folded_det(x);
        if (det.highest_deg() == 0 && det.lowest_deg() == 0) {
            // X^{-c} = adj(X^c)/det(X^c): polynomial entries, bounded support
            int maxdeg = 0;
            LaurentMatrix f = fold(w);
            for (auto& row : f.entries)
                for (auto& p : row) maxdeg = std::max(maxdeg, p.is_zero() ? 0 : p.highest_deg());
            int bound = n * (n - 1) * maxdeg + n;
            exact_result = true;
            out_hi = want_hi < 0 ? bound : std::max(want_hi, bound);
        } else {
            if (want_hi < 0) fail("WINDOW", "c_inverse of infinitely supported result needs a window");
            out_hi = want_hi;
        }
    } else {
        out_hi = want_hi < 0 ? x.d_hi() : std::min(want_hi, x.d_hi());
    }
    PeriodicBandMatrix y(n, 0, std::max(out_hi, 0), !x.exact_above() ? false : exact_result);
    for (int i = 1; i <= n; ++i) y.set(i, 0, Rat(1));
    for (int d = 1; d <= out_hi; ++d)
        for (int i = 1; i <= n; ++i) {
            Rat acc(0);
            for (int m = 1; m <= std::min(d, w.d_hi()); ++m) {
                const Rat& wv = w.cell(i, m);
                if (wv == 0) continue;
                acc -= wv * y.cell(y.rep(i + m), d - m);
            }
            y.set(i, d, acc);
        }
    if (exact_result) {
        PeriodicBandMatrix t = y.trimmed();
        if (want_hi >= 0 && t.d_hi() < want_hi) return t.with_window(t.d_lo(), want_hi).trimmed();
        return t;
    }
    return y;
}

} // namespace looptnn
