#include <catch_amalgamated.hpp>

#include "looptnn/json_io.hpp"
#include "test_helpers.hpp"

using namespace looptnn;
using namespace testutil;

namespace {

// unfolding of [[3, 1, 2/t], [1+t, 2, 1], [t, 0, 1]]
PeriodicBandMatrix ex2_matrix() {
    PeriodicBandMatrix x(3, -1, 2, true);
    x.set(1, -1, Rat(2));
    x.set(1, 0, Rat(3));
    x.set(1, 1, Rat(1));
    x.set(2, -1, Rat(1));
    x.set(2, 0, Rat(2));
    x.set(2, 1, Rat(1));
    x.set(2, 2, Rat(1));
    x.set(3, 0, Rat(1));
    x.set(3, 1, Rat(1));
    return x;
}

LaurentMatrix ex2_folded() {
    LaurentMatrix a(3);
    a.entries[0][0] = LaurentPoly(Rat(3));
    a.entries[0][1] = LaurentPoly(Rat(1));
    a.entries[0][2] = LaurentPoly::term(-1, Rat(2));
    a.entries[1][0] = LaurentPoly(Rat(1)) + LaurentPoly::term(1, Rat(1));
    a.entries[1][1] = LaurentPoly(Rat(2));
    a.entries[1][2] = LaurentPoly(Rat(1));
    a.entries[2][0] = LaurentPoly::term(1, Rat(1));
    a.entries[2][2] = LaurentPoly(Rat(1));
    return a;
}

// x_{i,j} entries of the network-example matrix with folding
// [[3+2t, 3/t+5+t], [1+4t, 1/t+7+2t]]
PeriodicBandMatrix ex3_matrix() {
    PeriodicBandMatrix x(2, -2, 3, true);
    x.set(1, -1, Rat(3));
    x.set(1, 0, Rat(3));
    x.set(1, 1, Rat(5));
    x.set(1, 2, Rat(2));
    x.set(1, 3, Rat(1));
    x.set(2, -2, Rat(1));
    x.set(2, -1, Rat(1));
    x.set(2, 0, Rat(7));
    x.set(2, 1, Rat(4));
    x.set(2, 2, Rat(2));
    return x;
}

LaurentMatrix rnd_laurent_matrix(Rng& rng, int n, int deg_lo, int deg_hi) {
    LaurentMatrix a(n);
    std::uniform_int_distribution<int> nonzero(0, 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int d = deg_lo; d <= deg_hi; ++d)
                if (nonzero(rng) == 0) a.entries[i][j].coef[d] = rnd_rat(rng);
    for (auto& row : a.entries)
        for (auto& p : row) p.normalize();
    return a;
}

} // namespace

TEST_CASE("unfold reproduces the 3x3 worked example") {
    auto x = unfold(ex2_folded(), 4);
    auto expect = ex2_matrix();
    CHECK(x.trimmed().d_lo() == -1);
    CHECK(x.trimmed().d_hi() == 2);
    CHECK(x.trimmed() == expect);
    CHECK(x.exact_above());
}

TEST_CASE("unfold of the identity is the identity band matrix") {
    auto x = unfold(LaurentMatrix::identity(4), 0);
    CHECK(x == PeriodicBandMatrix::identity(4));
    CHECK(x.d_lo() == 0);
    CHECK(x.d_hi() == 0);
}

TEST_CASE("fold/unfold round trip on random Laurent matrices") {
    Rng rng(20240401);
    for (int rep = 0; rep < 100; ++rep) {
        auto a = rnd_laurent_matrix(rng, 2, -1, 2);
        auto x = unfold(a, 8);
        auto b = fold(x);
        CHECK(b == a);
    }
}

TEST_CASE("fold of the network example matrix") {
    auto a = fold(ex3_matrix());
    CHECK(a.entries[0][0] == LaurentPoly(Rat(3)) + LaurentPoly::term(1, Rat(2)));
    CHECK(a.entries[0][1] ==
          LaurentPoly::term(-1, Rat(3)) + LaurentPoly(Rat(5)) + LaurentPoly::term(1, Rat(1)));
    CHECK(a.entries[1][0] == LaurentPoly(Rat(1)) + LaurentPoly::term(1, Rat(4)));
    CHECK(a.entries[1][1] ==
          LaurentPoly::term(-1, Rat(1)) + LaurentPoly(Rat(7)) + LaurentPoly::term(1, Rat(2)));
    auto det = folded_det(ex3_matrix());
    CHECK(det.at(0) == 6);
    CHECK(det.at(1) == -1);
    CHECK(det.coef.size() == 2);
}

TEST_CASE("fold/unfold round trip on random banded matrices") {
    Rng rng(7);
    for (int rep = 0; rep < 100; ++rep) {
        std::uniform_int_distribution<int> nd(1, 3);
        int n = nd(rng);
        PeriodicBandMatrix x(n, -1, 2, true);
        std::uniform_int_distribution<int> nonzero(0, 2);
        for (int i = 1; i <= n; ++i)
            for (int d = -1; d <= 2; ++d)
                if (nonzero(rng) == 0) x.set(i, d, rnd_rat(rng));
        CHECK(unfold(fold(x), x.d_hi()).trimmed() == x.trimmed());
    }
}

TEST_CASE("whirl product diagonals") {
    auto z = multiply(whirl({Rat(1), Rat(1)}), whirl({Rat(1), Rat(2)}));
    CHECK(z.at(1, 2) == 2);
    CHECK(z.at(2, 3) == 3);
    CHECK(z.at(1, 3) == 2);
    CHECK(z.at(2, 4) == 1);
    CHECK(z.trimmed().d_hi() == 2);
}

TEST_CASE("multiplying by the identity is the identity map") {
    Rng rng(11);
    auto w = rnd_polygen_word(rng, 3, 5);
    auto x = evaluate(w);
    CHECK(multiply(x, PeriodicBandMatrix::identity(3)).trimmed() == x.trimmed());
    CHECK(multiply(PeriodicBandMatrix::identity(3), x).trimmed() == x.trimmed());
}

TEST_CASE("the worked factorization word evaluates to the example matrix") {
    GeneratorWord w(3);
    w.atoms = {ChevF{3, Rat(2)}, ChevF{1, Rat(1)}, ChevE{2, Rat(1)}, ChevE{1, Rat(1)},
               ChevE{3, Rat(1)}};
    CHECK(evaluate(w) == ex2_matrix());
}

TEST_CASE("multiply agrees with direct convolution and is associative") {
    Rng rng(99);
    for (int rep = 0; rep < 40; ++rep) {
        int n = 1 + static_cast<int>(rng() % 3);
        auto x = evaluate(rnd_polygen_word(rng, n, 3));
        auto y = evaluate(rnd_polygen_word(rng, n, 3));
        auto z = evaluate(rnd_polygen_word(rng, n, 3));
        CHECK(multiply(x, y).trimmed() == naive_multiply(x, y).trimmed());
        CHECK(multiply(multiply(x, y), z).trimmed() == multiply(x, multiply(y, z)).trimmed());
    }
}

TEST_CASE("truncated multiplication respects exact windows") {
    auto c1 = curl({Rat(1), Rat(2)}, 8);
    auto c2 = curl({Rat(2), Rat(1)}, 8);
    auto z = multiply(c1, c2);
    CHECK_FALSE(z.exact_above());
    CHECK(z.d_hi() == 8);
    // against a larger-window computation
    auto zbig = multiply(curl({Rat(1), Rat(2)}, 12), curl({Rat(2), Rat(1)}, 12));
    CHECK(equal_on_window(z, zbig, 0, 8));
    // a factor with negative offsets shrinks the exact window of a truncated one
    auto shifted = multiply(shift_pow(2, -3), c1);
    CHECK_FALSE(shifted.exact_above());
    CHECK(shifted.d_hi() == 5);
    CHECK(shifted.at(1, 1) == c1.at(-2, 1));
}

TEST_CASE("minor of the curl-product example") {
    auto x = multiply(curl({Rat(1), Rat(1)}, 10), curl({Rat(1), Rat(2)}, 10));
    CHECK(minor_det(x, {1, 2}, {2, 3}) == 1);
    // entries frozen from the closed forms 2^{i+2}-3 and 3(2^i - 1)
    CHECK(x.at(1, 4) == 6);
    CHECK(x.at(1, 5) == 13);
    CHECK(x.at(2, 5) == 9);
}

TEST_CASE("interval minors of unitriangular matrices are 1") {
    Rng rng(5);
    auto x = evaluate(rnd_upper_word(rng, 3, 4));
    for (long long start : {-2LL, 1LL, 3LL}) {
        std::vector<long long> I = {start, start + 1, start + 2};
        CHECK(minor_det(x, I, I) == 1);
    }
}

TEST_CASE("minor agrees with cofactor expansion") {
    Rng rng(123);
    for (int rep = 0; rep < 50; ++rep) {
        auto x = evaluate(rnd_polygen_word(rng, 2, 4));
        std::uniform_int_distribution<long long> c(-2, 6);
        std::vector<long long> I = {c(rng), 0, 0}, J = {c(rng), 0, 0};
        I[1] = I[0] + 1 + rng() % 2;
        I[2] = I[1] + 1 + rng() % 2;
        J[1] = J[0] + 1 + rng() % 2;
        J[2] = J[1] + 1 + rng() % 2;
        CHECK(minor_det(x, I, J) == laplace_minor(x, I, J));
    }
}

TEST_CASE("Cauchy-Binet on random banded products") {
    Rng rng(321);
    for (int rep = 0; rep < 30; ++rep) {
        auto x = evaluate(rnd_polygen_word(rng, 2, 3));
        auto y = evaluate(rnd_polygen_word(rng, 2, 3));
        auto z = multiply(x, y);
        std::uniform_int_distribution<long long> c(-1, 4);
        long long i0 = c(rng), j0 = c(rng);
        std::vector<long long> I = {i0, i0 + 1 + static_cast<long long>(rng() % 2)};
        std::vector<long long> J = {j0, j0 + 1 + static_cast<long long>(rng() % 2)};
        Rat lhs = minor_det(z, I, J);
        Rat rhs(0);
        long long klo = std::min(I[0] + x.d_lo(), J[0] - y.d_hi()) - 1;
        long long khi = std::max(I[1] + x.d_hi(), J[1] - y.d_lo()) + 1;
        for (long long k1 = klo; k1 <= khi; ++k1)
            for (long long k2 = k1 + 1; k2 <= khi; ++k2)
                rhs += minor_det(x, I, {k1, k2}) * minor_det(y, {k1, k2}, J);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("generator constructors match their displays") {
    auto m = whirl({Rat(2), Rat(5)});
    CHECK(m.at(1, 1) == 1);
    CHECK(m.at(1, 2) == 2);
    CHECK(m.at(2, 3) == 5);
    CHECK(m.at(3, 4) == 2);
    CHECK(m.at(1, 3) == 0);

    auto c = curl({Rat(2), Rat(3)}, 6);
    CHECK(c.at(1, 2) == 2);
    CHECK(c.at(1, 3) == 6);
    CHECK(c.at(1, 4) == 12);  // b_1^2 b_2
    CHECK(c.at(2, 4) == 6);
    SECTION("symbolic pattern of the curl entry (1,4)") {
        Rat b1(5, 7), b2(3, 2);
        auto cc = curl({b1, b2}, 4);
        CHECK(cc.at(1, 4) == b1 * b1 * b2);
    }

    CHECK(whirl({Rat(0), Rat(0), Rat(0)}).trimmed() == PeriodicBandMatrix::identity(3));

    auto e = chevalley_e(3, 2, Rat(7));
    CHECK(e.at(2, 3) == 7);
    CHECK(e.at(5, 6) == 7);
    CHECK(e.at(1, 2) == 0);
    auto f = chevalley_f(3, 2, Rat(7));
    CHECK(f.at(3, 2) == 7);
    CHECK(f.at(1, 2) == 0);

    auto s = shift_pow(3, 1);
    CHECK(s.at(1, 2) == 1);
    CHECK(s.at(3, 4) == 1);
    CHECK_THROWS_AS(torus(2, {Rat(1), Rat(0)}), domain_error);
}

TEST_CASE("degenerate curls are finitely supported") {
    auto c = curl({Rat(3), Rat(0), Rat(2)}, 9);
    CHECK(c.exact_above());
    CHECK(c.trimmed().d_hi() <= 2);
    CHECK(c.at(1, 2) == 3);
    CHECK(c.at(3, 5) == 6);  // b_3 b_1
    CHECK(c.at(1, 3) == 0);
}

TEST_CASE("c-inverse of a whirl is the curl") {
    auto y = c_inverse(whirl({Rat(1), Rat(2)}), 8);
    CHECK(y.at(1, 3) == 2);  // b_1 b_2
    CHECK(y.at(1, 2) == 1);
    CHECK(y.at(2, 4) == 2);
    CHECK(equal_on_window(y, curl({Rat(1), Rat(2)}, 8), 0, 8));
    CHECK(c_inverse(PeriodicBandMatrix::identity(3)) == PeriodicBandMatrix::identity(3));
}

TEST_CASE("c-inverse is an involution on windows") {
    Rng rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        auto x = evaluate(rnd_upper_word(rng, 2, 3));
        auto yy = c_inverse(c_inverse(x, 10), 10);
        CHECK(equal_on_window(x, yy, 0, std::min(10, x.d_hi())));
    }
}

TEST_CASE("complementary minor identity for the sign twist") {
    Rng rng(29);
    for (int rep = 0; rep < 60; ++rep) {
        auto x = evaluate(rnd_upper_word(rng, 2, 3));
        auto xc = c_inverse(x, 14);
        std::uniform_int_distribution<long long> base(1, 3);
        long long i = base(rng);
        long long j = i + 2 + static_cast<long long>(rng() % 4);
        long long kmax = j - i + 1;
        long long k = 1 + static_cast<long long>(rng() % static_cast<unsigned long long>(
                                                     std::max(1LL, kmax - 1)));
        // det(X_{i,j,k}) over rows i..j-k, cols i+k..j
        auto solid = [&](const PeriodicBandMatrix& m, long long kk) {
            std::vector<long long> I, J;
            for (long long r = i; r <= j - kk; ++r) I.push_back(r);
            for (long long c = i + kk; c <= j; ++c) J.push_back(c);
            if (I.empty()) return Rat(1);
            return minor_det(m, I, J);
        };
        CHECK(solid(x, k) == solid(xc, j + 1 - i - k));
    }
}

TEST_CASE("the twist is an antihomomorphism") {
    Rng rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        auto x = evaluate(rnd_upper_word(rng, 2, 3));
        auto y = evaluate(rnd_upper_word(rng, 2, 3));
        auto lhs = c_inverse(multiply(x, y), 8);
        auto rhs = multiply(c_inverse(y, 10), c_inverse(x, 10));
        CHECK(equal_on_window(lhs, rhs, 0, 8));
    }
}

TEST_CASE("folded determinants of whirls and curls") {
    Rng rng(41);
    for (int n = 1; n <= 4; ++n) {
        auto a = rnd_tuple(rng, n);
        auto det = folded_det(whirl(a.v));
        LaurentPoly expect = LaurentPoly(Rat(1));
        Rat top = a.product();
        if (n % 2 == 0) top = -top;
        expect = expect + LaurentPoly::term(1, top);
        CHECK(det == expect);
        // curl: geometric series of the product
        int T = 3;
        auto cd = folded_det(curl(a.v, n * (T + 2)), T);
        Rat prod = a.product(), acc(1);
        for (int k = 0; k <= T; ++k) {
            CHECK(cd.at(k) == acc);
            acc *= prod;
        }
    }
    CHECK(folded_det(PeriodicBandMatrix::identity(3)) == LaurentPoly(Rat(1)));
}

TEST_CASE("folded determinant of the sign twist flips t for odd period") {
    Rng rng(43);
    for (int n = 2; n <= 3; ++n) {
        auto x = evaluate(rnd_upper_word(rng, n, 3));
        auto d = folded_det(x);
        auto dc = folded_det(c_transform(x));
        for (const auto& [k, c] : d.coef) {
            Rat expect = (n % 2 == 1 && k % 2 != 0) ? -c : c;
            CHECK(dc.at(k) == expect);
        }
    }
}

TEST_CASE("Dodgson condensation on random square submatrices") {
    Rng rng(47);
    int done = 0;
    while (done < 60) {
        auto x = evaluate(rnd_polygen_word(rng, 2, 4));
        std::uniform_int_distribution<long long> c(-2, 3);
        long long i0 = c(rng), j0 = c(rng);
        int k = 3 + static_cast<int>(rng() % 2);
        std::vector<long long> I, J;
        for (int t = 0; t < k; ++t) {
            I.push_back(i0 + t);
            J.push_back(j0 + t);
        }
        std::vector<long long> Imid(I.begin() + 1, I.end() - 1), Jmid(J.begin() + 1, J.end() - 1);
        Rat central = minor_det(x, Imid, Jmid);
        if (central == 0) continue;
        ++done;
        std::vector<long long> Itop(I.begin(), I.end() - 1), Ibot(I.begin() + 1, I.end());
        std::vector<long long> Jleft(J.begin(), J.end() - 1), Jright(J.begin() + 1, J.end());
        Rat lhs = minor_det(x, I, J) * central;
        Rat rhs = minor_det(x, Itop, Jleft) * minor_det(x, Ibot, Jright) -
                  minor_det(x, Ibot, Jleft) * minor_det(x, Itop, Jright);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("dropping the middle factor never increases entries") {
    Rng rng(53);
    for (int rep = 0; rep < 40; ++rep) {
        auto x = evaluate(rnd_upper_word(rng, 2, 2));
        auto y = evaluate(rnd_upper_word(rng, 2, 2));
        auto z = evaluate(rnd_upper_word(rng, 2, 2));
        auto xyz = multiply(multiply(x, y), z);
        auto xz = multiply(x, z);
        for (int i = 1; i <= 2; ++i)
            for (int d = 0; d <= xz.d_hi(); ++d) CHECK(xyz.at(i, i + d) >= xz.at(i, i + d));
    }
}

TEST_CASE("matrix JSON round trip") {
    Rng rng(61);
    for (int rep = 0; rep < 20; ++rep) {
        auto x = evaluate(rnd_polygen_word(rng, 3, 4));
        auto j = io::to_json(x);
        CHECK(io::matrix_from_json(j) == x);
    }
    auto c = curl({Rat(1), Rat(2)}, 5);
    CHECK(io::matrix_from_json(io::to_json(c)) == c);
    auto a = fold(ex3_matrix());
    CHECK(io::laurent_matrix_from_json(io::to_json(a)) == a);
}

TEST_CASE("entries outside a truncated window fail loudly") {
    auto c = curl({Rat(1), Rat(2)}, 4);
    CHECK_THROWS_AS(c.at(1, 7), domain_error);
    CHECK(c.at(1, -3) == 0);
    CHECK_THROWS_AS(minor_det(c, {1, 2}, {5, 6}), domain_error);
}
