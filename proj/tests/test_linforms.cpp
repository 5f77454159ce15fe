#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dioph/linforms.hpp"
#include "dioph/manifold.hpp"
#include "dioph/rng.hpp"
#include "oracles.hpp"

using namespace dioph;

TEST_CASE("residue: representative in (-1/2, 1/2]") {
    CHECK(residue(2.7) == doctest::Approx(-0.3));
    CHECK(residue(0.5) == 0.5);   // boundary belongs to the half-open interval
    CHECK(residue(-0.5) == 0.5);  // -0.5 - 0.5 = -1 is an integer
    CHECK(residue(1.5) == 0.5);
    CHECK(residue(-2.5) == 0.5);
    CHECK(residue(3.0) == 0.0);
}

TEST_CASE("residue: idempotence and bound on random inputs") {
    Rng rng(123);
    for (int i = 0; i < 1000; ++i) {
        double t = rng.uniform(-1e6, 1e6);
        double r = residue(t);
        CHECK(std::abs(r) <= 0.5);
        CHECK(r > -0.5);
        CHECK(residue(t - r) == 0.0);
        // t - residue(t) is an integer
        double k = t - r;
        CHECK(k == std::nearbyint(k));
    }
}

TEST_CASE("enumerate_solutions: directed examples") {
    // n=1, fx=0.5, Q=2, threshold 0.3: only +-2 qualify (dist(+-1*0.5, Z) = 0.5).
    auto sols = enumerate_solutions({0.5}, 2, 0.3);
    REQUIRE(sols.size() == 2);
    CHECK(sols[0] == std::vector<long long>{-2});
    CHECK(sols[1] == std::vector<long long>{2});

    // f(x) = 0 makes every form integral: all 8 nonzero a in {-1,0,1}^2.
    auto all8 = enumerate_solutions({0.0, 0.0}, 1, 0.1);
    CHECK(all8.size() == 8);

    CHECK_THROWS_AS(enumerate_solutions({0.5}, 2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_solutions({0.5}, 0, 0.1), std::invalid_argument);
}

TEST_CASE("enumerate_solutions: symmetry a <-> -a") {
    Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        Vec fx = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        auto sols = enumerate_solutions(fx, 4, rng.uniform(0.01, 0.4));
        for (const auto& a : sols) {
            std::vector<long long> neg(a.size());
            for (size_t i = 0; i < a.size(); ++i) neg[i] = -a[i];
            bool found = false;
            for (const auto& b : sols)
                if (b == neg) found = true;
            CHECK(found);
        }
    }
    // Directed boundary case: t with <t> = 1/2 exactly.
    auto sols = enumerate_solutions({0.25}, 2, 0.6);
    // a=2 gives residue 0.5 < 0.6, a=-2 residue 0.5 as well.
    bool has2 = false, hasm2 = false;
    for (const auto& a : sols) {
        if (a[0] == 2) has2 = true;
        if (a[0] == -2) hasm2 = true;
    }
    CHECK(has2);
    CHECK(hasm2);
}

TEST_CASE("enumerate_solutions matches the exact rational oracle") {
    // DERIVED oracle: exact integer arithmetic over rational points.
    oracles::RationalPoint pt{{3, 1}, 9};  // (1/3, 1/9)
    auto exact = oracles::rational_enumerate(pt, 3, 1, 20);  // threshold 0.05
    auto impl = enumerate_solutions({3.0 / 9.0, 1.0 / 9.0}, 3, 0.05);
    REQUIRE(exact.size() == impl.size());
    for (size_t i = 0; i < exact.size(); ++i) CHECK(exact[i] == impl[i]);
}

TEST_CASE("count agreement with the rational oracle: 100 random points, n <= 3, Q <= 8") {
    Rng rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 1 + static_cast<int>(rng.next_u64() % 3);
        long long den = 2 + static_cast<long long>(rng.next_u64() % 60);
        oracles::RationalPoint pt;
        pt.den = den;
        Vec fx(n);
        for (int i = 0; i < n; ++i) {
            long long num = static_cast<long long>(rng.next_u64() % (4 * den)) - 2 * den;
            pt.num.push_back(num);
            fx[i] = static_cast<double>(num) / static_cast<double>(den);
        }
        long long Q = 1 + static_cast<long long>(rng.next_u64() % 8);
        long long tn = 1 + static_cast<long long>(rng.next_u64() % 30);
        long long td = 100;
        auto exact = oracles::rational_enumerate(pt, Q, tn, td);
        auto impl = enumerate_solutions(fx, Q, static_cast<double>(tn) / static_cast<double>(td));
        CHECK(exact.size() == impl.size());
    }
}

TEST_CASE("minkowski box: reference constants at n=2, C0=1, L2=2, Q=10") {
    auto box = MinkowskiBox::from_constants(10, 1.0, 2, 2.0);
    CHECK(box.delta == doctest::Approx(0.0025));
    CHECK(box.a1_bound == doctest::Approx(160.0));
    CHECK(box.ai_bound == doctest::Approx(2.5));
    // Volume identity: 2^{n+1} delta a1 ai^{n-1} = 2^{n+1}.
    CHECK(box.delta * box.a1_bound * box.ai_bound == doctest::Approx(1.0));
}

TEST_CASE("minkowski box volume identity holds across n, Q, C0, L2") {
    Rng rng(55);
    for (int n = 1; n <= 4; ++n) {
        for (int trial = 0; trial < 20; ++trial) {
            long long Q = 1 + static_cast<long long>(rng.next_u64() % 100);
            double C0 = rng.uniform(0.05, 5.0);
            double L2 = rng.uniform(0.2, 4.0);
            auto box = MinkowskiBox::from_constants(Q, C0, n, L2);
            double vol = box.delta * box.a1_bound;
            for (int i = 1; i < n; ++i) vol *= box.ai_bound;
            CHECK(vol == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("minkowski_solve: zero point returns (1, 0, ..., 0) with a0 = 0") {
    for (int n : {1, 2, 3}) {
        Vec fx(n, 0.0);
        auto [form, box] = minkowski_solve(fx, 7, 1.0, 2.0);
        CHECK(form.a[0] == 1);
        for (int i = 1; i < n; ++i) CHECK(form.a[i] == 0);
        CHECK(form.a0 == 0);
    }
}

TEST_CASE("minkowski_solve: first solution in scan order at f(0.4), n=2") {
    // Independent oracle: explicit double loop in the documented order
    // (a2 outward outer, a1 outward inner), a0 = -round(fx . a).
    Vec fx = {0.4, 0.16};
    const double C0 = 1.0, L2 = 2.0;
    const long long Q = 10;
    auto box = MinkowskiBox::from_constants(Q, C0, 2, L2);
    long long A1 = static_cast<long long>(box.a1_bound), A2 = static_cast<long long>(box.ai_bound);
    std::vector<long long> expect;
    long long expect_a0 = 0;
    for (long long t2 = 0; t2 <= 2 * A2 && expect.empty(); ++t2) {
        long long a2 = (t2 % 2 == 1) ? (t2 + 1) / 2 : -(t2 / 2);
        for (long long t1 = 0; t1 <= 2 * A1; ++t1) {
            long long a1 = (t1 % 2 == 1) ? (t1 + 1) / 2 : -(t1 / 2);
            if (a1 == 0 && a2 == 0) continue;
            double v = fx[0] * a1 + fx[1] * a2;
            double F = residue(v);
            if (std::abs(F) <= box.delta) {
                expect = {a1, a2};
                expect_a0 = -nearest_int(v);
                break;
            }
        }
    }
    REQUIRE(!expect.empty());
    auto [form, b2] = minkowski_solve(fx, Q, C0, L2);
    CHECK(form.a == expect);
    CHECK(form.a0 == expect_a0);
    CHECK(std::abs(fx[0] * form.a[0] + fx[1] * form.a[1] + form.a0) <= box.delta);
}

TEST_CASE("minkowski_solve: constraints hold on random points") {
    Rng rng(2024);
    for (int n : {2, 3}) {
        auto map = ManifoldMap::veronese(n);
        Ball region = Ball::interval(0.0, 1.0);
        double L2 = map.derivative_bounds(region).L2;
        for (long long Q : {5LL, 10LL, 20LL}) {
            for (int trial = 0; trial < 300; ++trial) {
                Vec fx = map.eval({rng.uniform(0.0, 1.0)});
                auto [form, box] = minkowski_solve(fx, Q, 1.0, L2);
                double F = dot(fx, form.a) + static_cast<double>(form.a0);
                CHECK(std::abs(F) <= box.delta);
                CHECK(std::abs(form.a[0]) <= box.a1_bound);
                for (int i = 1; i < n; ++i) CHECK(std::abs(form.a[i]) <= box.ai_bound);
                CHECK(form.sup_norm() > 0);
            }
        }
    }
}
