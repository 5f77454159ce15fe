#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dioph/manifold.hpp"
#include "dioph/rng.hpp"
#include "oracles.hpp"

using namespace dioph;

TEST_CASE("eval: veronese and polynomial maps") {
    auto v3 = ManifoldMap::veronese(3);
    Vec y = v3.eval({2.0});
    CHECK(y == Vec{2.0, 4.0, 8.0});

    auto v2 = ManifoldMap::veronese(2);
    CHECK(v2.eval({0.0}) == Vec{0.0, 0.0});

    auto pm = ManifoldMap::polynomial_1d({{0.0, 1.0}, {-1.0, 0.0, 1.0}});  // (x, x^2 - 1)
    CHECK(pm.eval({1.0}) == Vec{1.0, 0.0});
}

TEST_CASE("partial: exact derivatives of the coefficient table") {
    auto v2 = ManifoldMap::veronese(2);
    CHECK(v2.partial({0.5}, {1}) == Vec{1.0, 1.0});
    CHECK(v2.partial({0.37}, {2}) == Vec{0.0, 2.0});
    CHECK(v2.partial({-1.4}, {3}) == Vec{0.0, 0.0});
}

TEST_CASE("partial agrees with central finite differences") {
    Rng rng(42);
    auto v3 = ManifoldMap::veronese(3);
    const double h = 1e-5;
    for (int i = 0; i < 100; ++i) {
        double x = rng.uniform(0.1, 0.9);
        for (int coord = 0; coord < 3; ++coord) {
            auto f = [&](double t) { return v3.eval({t})[coord]; };
            double d1 = v3.partial({x}, {1})[coord];
            double d2 = v3.partial({x}, {2})[coord];
            double fd1 = oracles::central_diff_1(f, x, h);
            double fd2 = oracles::central_diff_2(f, x, h);
            CHECK(std::abs(fd1 - d1) <= 1e-6 * std::max(1.0, std::abs(d1)));
            CHECK(std::abs(fd2 - d2) <= 1e-6 * std::max(1.0, std::abs(d2)));
        }
    }
}

TEST_CASE("nondeg_order: veronese curves span at l = n") {
    auto v2 = ManifoldMap::veronese(2);
    // {(1, 2x), (0, 2)} has rank 2 for every x: determinant is 2.
    auto l = v2.nondeg_order({0.3}, 5);
    REQUIRE(l.has_value());
    CHECK(*l == 2);

    auto v3 = ManifoldMap::veronese(3);
    // Wronskian of (x, x^2, x^3) at x = 1: det [[1,2,3],[0,2,6],[0,0,6]] = 12.
    auto l3 = v3.nondeg_order({1.0}, 5);
    REQUIRE(l3.has_value());
    CHECK(*l3 == 3);
}

TEST_CASE("nondeg_order: degenerate image in a line has no order") {
    auto degenerate = ManifoldMap::polynomial_1d({{0.0, 1.0}, {0.0, 2.0}});  // (x, 2x)
    CHECK_FALSE(degenerate.nondeg_order({0.7}, 5).has_value());
    CHECK_FALSE(degenerate.nondeg_order({-2.0}, 5).has_value());
}

TEST_CASE("nondeg_order is invariant under invertible recombination") {
    Rng rng(7);
    auto v3 = ManifoldMap::veronese(3);
    for (int trial = 0; trial < 20; ++trial) {
        // Random invertible integer matrix via unit upper/lower triangulars.
        long long u01 = static_cast<long long>(rng.next_u64() % 5) - 2;
        long long u02 = static_cast<long long>(rng.next_u64() % 5) - 2;
        long long u12 = static_cast<long long>(rng.next_u64() % 5) - 2;
        long long l10 = static_cast<long long>(rng.next_u64() % 5) - 2;
        long long l20 = static_cast<long long>(rng.next_u64() % 5) - 2;
        long long l21 = static_cast<long long>(rng.next_u64() % 5) - 2;
        double M[3][3];
        // M = L * U with unit diagonals: det = 1.
        double U[3][3] = {{1, double(u01), double(u02)}, {0, 1, double(u12)}, {0, 0, 1}};
        double L[3][3] = {{1, 0, 0}, {double(l10), 1, 0}, {double(l20), double(l21), 1}};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                M[i][j] = 0;
                for (int k = 0; k < 3; ++k) M[i][j] += L[i][k] * U[k][j];
            }
        std::vector<SparsePoly> coords;
        for (int i = 0; i < 3; ++i) {
            std::vector<SparsePoly::Term> terms;
            for (int j = 0; j < 3; ++j)
                if (M[i][j] != 0.0) terms.push_back({{j + 1}, M[i][j]});
            coords.push_back(SparsePoly(1, terms));
        }
        auto recombined = ManifoldMap::polynomial(1, coords);
        double x = rng.uniform(0.1, 0.9);
        auto a = v3.nondeg_order({x}, 5);
        auto b = recombined.nondeg_order({x}, 5);
        REQUIRE(a.has_value());
        REQUIRE(b.has_value());
        CHECK(*a == *b);
    }
}

TEST_CASE("derivative_bounds: veronese examples on [0,1]") {
    Ball region = Ball::interval(0.0, 1.0);

    auto v2 = ManifoldMap::veronese(2);
    DerivBounds b2 = v2.derivative_bounds(region, 33, 1.0);
    CHECK(b2.L1 == doctest::Approx(2.0));  // f'' = (0, 2)
    CHECK(b2.L2 == doctest::Approx(2.0));  // grad f = (1, 2x), max at x = 1

    auto v3 = ManifoldMap::veronese(3);
    DerivBounds b3 = v3.derivative_bounds(region, 33, 1.0);
    CHECK(b3.L1 == doctest::Approx(6.0));  // 6x at x = 1
    CHECK(b3.L2 == doctest::Approx(3.0));

    auto linear = ManifoldMap::polynomial_1d({{0.0, 1.0}});  // f(x) = x
    DerivBounds bl = linear.derivative_bounds(region, 33, 1.0);
    CHECK(bl.L1 == 0.0);
    CHECK(bl.L2 == 1.0);
}

TEST_CASE("derivative_bounds: degenerate region rejected") {
    CHECK_THROWS_AS(Ball({0.5}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(Ball({0.5}, -1.0), std::invalid_argument);
    auto v2 = ManifoldMap::veronese(2);
    Ball region = Ball::interval(0.0, 1.0);
    CHECK_THROWS_AS(v2.derivative_bounds(region, 1), std::invalid_argument);
}

TEST_CASE("derivative_bounds with safety 1.1 covers exact suprema, n <= 5") {
    Ball region = Ball::interval(0.0, 1.0);
    for (int n = 1; n <= 5; ++n) {
        auto v = ManifoldMap::veronese(n);
        DerivBounds b = v.derivative_bounds(region, 33, 1.1);
        // Exact suprema on [0,1] by monomial monotonicity: max k(k-1) and max k.
        double exact_L1 = n >= 2 ? n * (n - 1.0) : 0.0;
        double exact_L2 = n;
        CHECK(b.L1 >= exact_L1);
        CHECK(b.L2 >= exact_L2);
    }
}

TEST_CASE("two-variable maps: evaluation, partials, non-degeneracy order") {
    // f(x, y) = (x, y, x^2 + y^2)
    SparsePoly fx = SparsePoly::variable(2, 0);
    SparsePoly fy = SparsePoly::variable(2, 1);
    SparsePoly fq(2, {{{2, 0}, 1.0}, {{0, 2}, 1.0}});
    auto map = ManifoldMap::polynomial(2, {fx, fy, fq});
    CHECK(map.domain_dim() == 2);
    CHECK(map.ambient_dim() == 3);
    CHECK(map.first_coordinate_chart());
    CHECK(map.eval({0.5, -1.0}) == Vec{0.5, -1.0, 1.25});
    CHECK(map.partial({0.3, 0.4}, {1, 0}) == Vec{1.0, 0.0, 0.6});
    CHECK(map.partial({0.3, 0.4}, {0, 1}) == Vec{0.0, 1.0, 0.8});
    CHECK(map.partial({0.3, 0.4}, {1, 1}) == Vec{0.0, 0.0, 0.0});
    CHECK(map.partial({0.3, 0.4}, {2, 0}) == Vec{0.0, 0.0, 2.0});
    // Gradients span a plane; the second-order partial completes R^3 at l = 2.
    auto l = map.nondeg_order({0.3, 0.4}, 5);
    REQUIRE(l.has_value());
    CHECK(*l == 2);
    DerivBounds b = map.derivative_bounds(Ball({0.0, 0.0}, 1.0), 9, 1.0);
    CHECK(b.L1 == doctest::Approx(2.0));
    CHECK(b.L2 >= 1.0);
}

TEST_CASE("ball scaling keeps the center") {
    Ball b({0.25, -1.0}, 0.5);
    Ball b3 = b.scaled(3.0);
    CHECK(b3.center == b.center);
    CHECK(b3.radius == 1.5);
    CHECK(b.volume() == doctest::Approx(M_PI * 0.25));
    CHECK(Ball::interval(0.0, 1.0).volume() == doctest::Approx(1.0));
}

TEST_CASE("first-coordinate chart detection is symbolic") {
    CHECK(ManifoldMap::veronese(3).first_coordinate_chart());
    CHECK(ManifoldMap::polynomial_1d({{0.0, 1.0}, {0.0, 0.0, 5.0}}).first_coordinate_chart());
    CHECK_FALSE(ManifoldMap::polynomial_1d({{0.0, 2.0}}).first_coordinate_chart());
    CHECK_FALSE(ManifoldMap::polynomial_1d({{0.1, 1.0}}).first_coordinate_chart());
}
