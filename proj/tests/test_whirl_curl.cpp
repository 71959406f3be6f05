#include <catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace looptnn;
using namespace looptnn::whirl_curl;
using namespace testutil;

namespace {

Rat brute_kappa(const ParamTuple& a, const ParamTuple& b, long long i) {
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

ParamTuple deg_tuple(int n, int k, const Rat& a) {
    ParamTuple t;
    t.v.assign(n, Rat(0));
    t.v[((k - 1) % n + n) % n] = a;
    return t;
}

} // namespace

TEST_CASE("kappa worked example and base case") {
    ParamTuple a({Rat(1), Rat(1)}), b({Rat(1), Rat(2)});
    CHECK(kappa(a, b, 1) == 3);
    CHECK(kappa(a, b, 2) == 2);
    ParamTuple s1({Rat(7)}), s2({Rat(9)});
    CHECK(kappa(s1, s2, 1) == 1);
}

TEST_CASE("kappa agrees with term enumeration") {
    Rng rng(101);
    for (int rep = 0; rep < 50; ++rep) {
        auto a = rnd_tuple(rng, 3);
        auto b = rnd_tuple(rng, 3);
        for (long long i = 1; i <= 3; ++i) CHECK(kappa(a, b, i) == brute_kappa(a, b, i));
    }
}

TEST_CASE("eta worked example") {
    auto [bp, ap] = eta(ParamTuple({Rat(1), Rat(1)}), ParamTuple({Rat(1), Rat(2)}));
    CHECK(bp.v == std::vector<Rat>{Rat(4, 3), Rat(3, 2)});
    CHECK(ap.v == std::vector<Rat>{Rat(2, 3), Rat(3, 2)});
}

TEST_CASE("eta fixes pairs with equal products") {
    Rng rng(103);
    for (int rep = 0; rep < 20; ++rep) {
        auto a = rnd_tuple(rng, 3);
        auto [bp, ap] = eta(a, a);
        CHECK(bp == a);
        CHECK(ap == a);
    }
}

TEST_CASE("eta closed form for period three") {
    Rng rng(107);
    for (int rep = 0; rep < 30; ++rep) {
        auto a = rnd_tuple(rng, 3);
        auto b = rnd_tuple(rng, 3);
        auto [bp, ap] = eta(a, b);
        Rat num = b.v[1] * (a.v[0] * a.v[2] + a.v[0] * b.v[2] + b.v[0] * b.v[2]);
        Rat den = a.v[1] * a.v[2] + b.v[1] * a.v[2] + b.v[1] * b.v[2];
        CHECK(bp.v[0] == num / den);
    }
}

TEST_CASE("eta conservation laws and involution") {
    Rng rng(109);
    for (int rep = 0; rep < 200; ++rep) {
        int n = 1 + static_cast<int>(rng() % 4);
        auto a = rnd_tuple(rng, n);
        auto b = rnd_tuple(rng, n);
        auto [bp, ap] = eta(a, b);
        for (int i = 1; i <= n; ++i) {
            CHECK(ap.val(i) + bp.val(i) == a.val(i) + b.val(i));
            CHECK(bp.val(i) * ap.val(i + 1) == a.val(i) * b.val(i + 1));
        }
        CHECK(ap.product() == a.product());
        CHECK(bp.product() == b.product());
        auto [b2, a2] = eta(bp, ap);
        CHECK(b2 == a);
        CHECK(a2 == b);
    }
}

TEST_CASE("whirl and curl commutation identities hold entrywise") {
    Rng rng(113);
    for (int rep = 0; rep < 60; ++rep) {
        int n = 1 + static_cast<int>(rng() % 4);
        auto a = rnd_tuple(rng, n);
        auto b = rnd_tuple(rng, n);
        auto [bp, ap] = eta(a, b);
        CHECK(multiply(whirl(a.v), whirl(b.v)) == multiply(whirl(bp.v), whirl(ap.v)));
        auto lhs = multiply(curl(b.v, 8), curl(a.v, 8));
        auto rhs = multiply(curl(ap.v, 8), curl(bp.v, 8));
        CHECK(equal_on_window(lhs, rhs, 0, 8));
    }
}

TEST_CASE("theta commutes a whirl past a curl") {
    SECTION("period one is plain commutation") {
        auto [bp, ap] = theta(ParamTuple({Rat(3)}), ParamTuple({Rat(5)}));
        CHECK(bp.v == std::vector<Rat>{Rat(5)});
        CHECK(ap.v == std::vector<Rat>{Rat(3)});
        auto lhs = multiply(whirl({Rat(3)}), curl({Rat(5)}, 6));
        auto rhs = multiply(curl({Rat(5)}, 6), whirl({Rat(3)}));
        CHECK(equal_on_window(lhs, rhs, 0, 6));
    }
    SECTION("n = 2 worked instance to offset 6") {
        ParamTuple a({Rat(1), Rat(2)}), b({Rat(3), Rat(4)});
        auto [bp, ap] = theta(a, b);
        auto lhs = multiply(whirl(a.v), curl(b.v, 8));
        auto rhs = multiply(curl(bp.v, 8), whirl(ap.v));
        CHECK(equal_on_window(lhs, rhs, 0, 6));
    }
    SECTION("random identities") {
        Rng rng(127);
        for (int rep = 0; rep < 60; ++rep) {
            int n = 1 + static_cast<int>(rng() % 4);
            auto a = rnd_tuple(rng, n);
            auto b = rnd_tuple(rng, n);
            auto [bp, ap] = theta(a, b);
            auto lhs = multiply(whirl(a.v), curl(b.v, 8));
            auto rhs = multiply(curl(bp.v, 8), whirl(ap.v));
            CHECK(equal_on_window(lhs, rhs, 0, 7));
        }
    }
}

TEST_CASE("theta conservation, inverse, and power formulas") {
    Rng rng(131);
    for (int rep = 0; rep < 100; ++rep) {
        int n = 1 + static_cast<int>(rng() % 4);
        auto a = rnd_tuple(rng, n);
        auto b = rnd_tuple(rng, n);
        auto [bp, ap] = theta(a, b);
        for (int i = 1; i <= n; ++i) CHECK(ap.val(i) + bp.val(i) == a.val(i) + b.val(i));
        CHECK(ap.product() == a.product());
        CHECK(bp.product() == b.product());
        auto [b0, a0] = theta_inverse(ap, bp);
        CHECK(b0 == b);
        CHECK(a0 == a);

        // iterate theta; odd and even power closed forms, and lcm(n,2) = id
        ParamTuple ca = a, cb = b;
        int period = std::lcm(n, 2);
        for (int p = 1; p <= period; ++p) {
            auto [nb, na] = theta(ca, cb);
            ca = na;
            cb = nb;
            if (p % 2 == 1) {
                for (int i = 1; i <= n; ++i) {
                    Rat den = a.val(i + p) + b.val(i + p);
                    CHECK(cb.val(i) == (a.val(i) + b.val(i)) * b.val(i + p) / den);
                    CHECK(ca.val(i) == (a.val(i) + b.val(i)) * a.val(i + p) / den);
                }
            } else {
                for (int i = 1; i <= n; ++i) {
                    Rat den = a.val(i + p) + b.val(i + p);
                    CHECK(ca.val(i) == (a.val(i) + b.val(i)) * a.val(i + p) / den);
                    CHECK(cb.val(i) == (a.val(i) + b.val(i)) * b.val(i + p) / den);
                }
            }
        }
        CHECK(ca == a);
        CHECK(cb == b);
    }
}

TEST_CASE("eta word action: worked example, involution, braid") {
    ParamList L = {ParamTuple({Rat(1), Rat(1)}), ParamTuple({Rat(1), Rat(2)})};
    auto R = apply_eta_word({1}, L);
    CHECK(R[0].v == std::vector<Rat>{Rat(4, 3), Rat(3, 2)});
    CHECK(R[1].v == std::vector<Rat>{Rat(2, 3), Rat(3, 2)});

    Rng rng(137);
    for (int rep = 0; rep < 60; ++rep) {
        int n = 1 + static_cast<int>(rng() % 3);
        ParamList list = {rnd_tuple(rng, n), rnd_tuple(rng, n), rnd_tuple(rng, n)};
        auto twice = apply_eta_word({1, 1}, list);
        CHECK(twice == list);
        auto lhs = apply_eta_word({1, 2, 1}, list);
        auto rhs = apply_eta_word({2, 1, 2}, list);
        CHECK(lhs == rhs);
        // the action preserves the curl product
        auto prod = [&](const ParamList& l) {
            auto m = PeriodicBandMatrix::identity(n);
            for (const auto& t : l) m = multiply(m, curl(t.v, 8));
            return m;
        };
        CHECK(equal_on_window(prod(list), prod(lhs), 0, 8));
    }
}

TEST_CASE("inadmissible eta pairs are rejected with a position") {
    // both tuples vanish at index 2, so kappa_1 = 0 and the map is undefined
    ParamList L = {deg_tuple(2, 1, Rat(1)), deg_tuple(2, 1, Rat(2))};
    try {
        apply_eta_word({1}, L);
        FAIL("expected inadmissible pair");
    } catch (const domain_error& e) {
        CHECK(e.code() == "INADMISSIBLE_ETA");
        CHECK(std::string(e.what()).find("position 0") != std::string::npos);
    }
}

TEST_CASE("Chevalley absorption through whirls") {
    SECTION("worked instance: e_1(1) M(1,2) = M(2,1) e_2(1)") {
        auto r = absorb_chevalley(TupleKind::Whirl, 1, Rat(1), {ParamTuple({Rat(1), Rat(2)})});
        REQUIRE(r.tuples.size() == 1);
        CHECK(r.tuples[0].v == std::vector<Rat>{Rat(2), Rat(1)});
        CHECK(r.k == 2);
        CHECK(r.a == 1);
        CHECK(multiply(chevalley_e(2, 1, Rat(1)), whirl({Rat(1), Rat(2)})) ==
              multiply(whirl({Rat(2), Rat(1)}), chevalley_e(2, 2, Rat(1))));
    }
    SECTION("zero parameter leaves the list unchanged") {
        Rng rng(139);
        auto b = rnd_tuple(rng, 3);
        auto r = absorb_chevalley(TupleKind::Whirl, 2, Rat(0), {b});
        CHECK(r.tuples[0] == b);
        CHECK(r.a == 0);
    }
    SECTION("random identities via band multiplication") {
        Rng rng(149);
        for (int rep = 0; rep < 50; ++rep) {
            int n = 2 + static_cast<int>(rng() % 3);
            int k = 1 + static_cast<int>(rng() % n);
            Rat a0 = rnd_rat(rng);
            ParamList list = {rnd_tuple(rng, n), rnd_tuple(rng, n)};
            auto r = absorb_chevalley(TupleKind::Whirl, k, a0, list);
            CHECK(r.k == (k + 2 - 1) % n + 1);
            auto lhs = multiply(chevalley_e(n, k, a0),
                                multiply(whirl(list[0].v), whirl(list[1].v)));
            auto rhs = multiply(multiply(whirl(r.tuples[0].v), whirl(r.tuples[1].v)),
                                chevalley_e(n, r.k, r.a));
            CHECK(lhs == rhs);
        }
    }
    SECTION("residual parameters of a long summable list decrease toward zero") {
        int n = 2;
        ParamList list;
        Rat decay(1, 2);
        Rat scale(1);
        for (int i = 0; i < 20; ++i) {
            list.push_back(ParamTuple({scale, scale * Rat(2, 3)}));
            scale *= decay;
        }
        auto r = absorb_chevalley(TupleKind::Whirl, 1, Rat(1), list);
        REQUIRE(r.steps.size() == 20);
        CHECK(r.steps[5].a < r.steps[0].a);
        CHECK(r.steps[19].a < r.steps[10].a);
        CHECK(r.steps[19].a < Rat(1, 100));
    }
}

TEST_CASE("Chevalley absorption through curls") {
    Rng rng(151);
    for (int rep = 0; rep < 50; ++rep) {
        int n = 2 + static_cast<int>(rng() % 3);
        int k = 1 + static_cast<int>(rng() % n);
        Rat a0 = rnd_rat(rng);
        ParamList list = {rnd_tuple(rng, n), rnd_tuple(rng, n)};
        auto r = absorb_chevalley(TupleKind::Curl, k, a0, list);
        CHECK(r.k == (k - 2 - 1 + 2 * n) % n + 1);
        auto lhs = multiply(chevalley_e(n, k, a0),
                            multiply(curl(list[0].v, 8), curl(list[1].v, 8)));
        auto rhs = multiply(multiply(curl(r.tuples[0].v, 8), curl(r.tuples[1].v, 8)),
                            chevalley_e(n, r.k, r.a));
        CHECK(equal_on_window(lhs, rhs, 0, 8));
    }
}

TEST_CASE("degenerate whirls factor into Chevalley generators") {
    SECTION("single nonzero parameter") {
        auto w = degenerate_whirl_to_word(ParamTuple({Rat(5), Rat(0)}));
        REQUIRE(w.atoms.size() == 1);
        CHECK(std::get<ChevE>(w.atoms[0]).k == 1);
        CHECK(evaluate(w) == whirl({Rat(5), Rat(0)}).trimmed());
    }
    SECTION("one run of length two") {
        Rng rng(157);
        auto a1 = rnd_rat(rng), a2 = rnd_rat(rng);
        auto w = degenerate_whirl_to_word(ParamTuple({a1, a2, Rat(0)}));
        REQUIRE(w.atoms.size() == 2);
        CHECK(evaluate(w) == whirl({a1, a2, Rat(0)}).trimmed());
    }
    SECTION("two singleton runs commute") {
        Rng rng(163);
        auto a1 = rnd_rat(rng), a3 = rnd_rat(rng);
        auto w = degenerate_whirl_to_word(ParamTuple({a1, Rat(0), a3, Rat(0)}));
        REQUIRE(w.atoms.size() == 2);
        auto target = whirl({a1, Rat(0), a3, Rat(0)}).trimmed();
        CHECK(evaluate(w) == target);
        GeneratorWord rev(4);
        rev.atoms = {w.atoms[1], w.atoms[0]};
        CHECK(evaluate(rev) == target);
    }
    SECTION("wrap-around run") {
        Rng rng(167);
        auto a3 = rnd_rat(rng), a1 = rnd_rat(rng);
        auto w = degenerate_whirl_to_word(ParamTuple({a1, Rat(0), a3}));
        CHECK(evaluate(w) == whirl({a1, Rat(0), a3}).trimmed());
    }
    SECTION("random degenerate tuples") {
        Rng rng(173);
        for (int rep = 0; rep < 60; ++rep) {
            int n = 2 + static_cast<int>(rng() % 4);
            auto t = rnd_tuple(rng, n, true);
            t.v[rng() % n] = 0;
            auto w = degenerate_whirl_to_word(t);
            CHECK(evaluate(w) == whirl(t.v).trimmed());
        }
    }
    CHECK_THROWS_AS(degenerate_whirl_to_word(ParamTuple({Rat(1), Rat(2)})), domain_error);
}

TEST_CASE("curls with proportional tuples commute") {
    Rng rng(179);
    for (int rep = 0; rep < 30; ++rep) {
        Rat a = rnd_rat(rng), b = rnd_rat(rng), s = rnd_rat(rng);
        Rat c = a * s, d = b * s; // a/b = c/d
        auto lhs = multiply(curl({a, b}, 8), curl({c, d}, 8));
        auto rhs = multiply(curl({c, d}, 8), curl({a, b}, 8));
        CHECK(equal_on_window(lhs, rhs, 0, 8));
    }
}
