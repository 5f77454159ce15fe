#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dioph/regsys.hpp"
#include "dioph/rng.hpp"

using namespace dioph;

namespace {

struct Setup {
    ManifoldMap map = ManifoldMap::veronese(2);
    Ball region = Ball::interval(0.0, 1.0);
    DomainConstants consts;
    Setup() {
        DerivBounds db = map.derivative_bounds(region);
        consts = DomainConstants::construction_scale(64.0, db, 2, 1, region);
    }
};

}  // namespace

TEST_CASE("constants chain identities") {
    Setup s;
    const auto& c = s.consts;
    double base = 4.0 * c.C0 * ipow(2.0 * c.L2, 1);
    CHECK(c.C3 == doctest::Approx(ipow(base, 3)).epsilon(1e-12));
    CHECK(c.C3 == doctest::Approx(64.0).epsilon(1e-12));
    CHECK(c.C4 == doctest::Approx(c.C3 * 2.0 / (2.0 * c.C0)).epsilon(1e-12));
    CHECK(c.C5 == doctest::Approx(1.0 * 2.0 * base * c.L2).epsilon(1e-12));
    CHECK(c.C6 == 0.125);  // d = 1
    CHECK(c.K2 == 0.5);    // d = 1
    CHECK(c.K3 == doctest::Approx(12.0 * 2.0 * c.C5).epsilon(1e-12));
    CHECK(c.K1 == doctest::Approx(1.0 / (2.0 * 2.0 * (c.C4 + 1.0))).epsilon(1e-12));
    CHECK(c.Q1 == 1);
}

TEST_CASE("build_regular_system: guards") {
    Setup s;
    CHECK_THROWS_AS(Ball({0.5}, 0.0), std::invalid_argument);  // degenerate region
    DomainConstants gated = s.consts;
    gated.Q0 = 10;
    CHECK_THROWS_AS(build_regular_system(s.map, s.region, 8, gated, Sampler::grid(100)),
                    std::invalid_argument);
    auto no_chart = ManifoldMap::polynomial_1d({{0.0, 2.0}, {0.0, 0.0, 1.0}});
    CHECK_THROWS_AS(build_regular_system(no_chart, s.region, 8, s.consts, Sampler::grid(100)),
                    std::invalid_argument);
    // Image in a line: degenerate map, chart flag notwithstanding.
    auto degenerate = ManifoldMap::polynomial_1d({{0.0, 1.0}, {0.0, 2.0}});
    CHECK_THROWS_AS(build_regular_system(degenerate, s.region, 8, s.consts, Sampler::grid(100)),
                    std::invalid_argument);
}

TEST_CASE("build_regular_system: certificate invariants hold by construction") {
    Setup s;
    auto cert = build_regular_system(s.map, s.region, 8, s.consts, Sampler::grid(10000));
    CHECK(cert.t() >= 1);
    CHECK(cert.T == doctest::Approx(s.consts.C3 * 512.0));
    double Tinv = 1.0 / cert.T;
    for (const auto& m : cert.members) {
        CHECK(m.R.weight_N >= cert.lambda_T);
        CHECK(m.R.weight_N <= cert.T);
        CHECK(2.0 * m.ball_radius == doctest::Approx(Tinv).epsilon(1e-15));
        CHECK(std::abs(form_value(s.map, m.R, m.z)) <= 10.0 * default_zero_tol(m.R.form));
    }
    auto verify = verify_certificate(cert, s.map, {Tinv / 4.0, Tinv / 16.0});
    CHECK(verify.violations.empty());
    CHECK(verify.K1_hat > 0.0);
    CHECK(verify.K2_hat > 0.0);
    CHECK(verify.K3_hat / verify.K2_hat < 100.0);
}

TEST_CASE("verify_certificate: gamma range is open") {
    Setup s;
    auto cert = build_regular_system(s.map, s.region, 8, s.consts, Sampler::grid(2000));
    CHECK_THROWS_AS(verify_certificate(cert, s.map, {1.0 / cert.T}), std::invalid_argument);
    CHECK_THROWS_AS(verify_certificate(cert, s.map, {0.0}), std::invalid_argument);
}

TEST_CASE("verify_certificate: constructed failures are reported") {
    Setup s;
    auto cert = build_regular_system(s.map, s.region, 8, s.consts, Sampler::grid(2000));
    REQUIRE(cert.t() >= 2);
    SUBCASE("overlapping balls") {
        auto broken = cert;
        broken.members[1].z = broken.members[0].z;  // same center: balls overlap
        auto verify = verify_certificate(broken, s.map, {1.0 / (4.0 * cert.T)});
        CHECK(!verify.violations.empty());
    }
    SUBCASE("weight outside the window") {
        auto broken = cert;
        broken.members[0].R.weight_N = cert.T * 4.0;
        auto verify = verify_certificate(broken, s.map, {1.0 / (4.0 * cert.T)});
        CHECK(!verify.violations.empty());
    }
    SUBCASE("anchor off the resonant set") {
        auto broken = cert;
        broken.members[0].z[0] += 17.0 * broken.members[0].ball_radius;
        auto verify = verify_certificate(broken, s.map, {1.0 / (4.0 * cert.T)});
        CHECK(!verify.violations.empty());
    }
}

TEST_CASE("build_regular_system: member count scales like T across a Q doubling") {
    Setup s;
    auto c8 = build_regular_system(s.map, s.region, 8, s.consts,
                                   Sampler::grid(static_cast<long long>(8.0 * s.consts.T_of_Q(8))));
    auto c16 = build_regular_system(s.map, s.region, 16, s.consts,
                                    Sampler::grid(static_cast<long long>(8.0 * s.consts.T_of_Q(16))));
    REQUIRE(c8.t() >= 1);
    double ratio = static_cast<double>(c16.t()) / static_cast<double>(c8.t());
    // T grows by 2^{n+1} = 8; accept [0.25, 4] x the predicted factor.
    CHECK(ratio >= 2.0);
    CHECK(ratio <= 32.0);
}

TEST_CASE("dyadic_overlap_experiment: guards") {
    Setup s;
    CHECK_THROWS_AS(
        dyadic_overlap_experiment(s.map, s.region, ApproxFn::power(1.0), 8, 7, s.consts),
        std::invalid_argument);
    // Power(1) violates Psi(h) <= h^-1/2 (clamp required).
    CHECK_THROWS_AS(
        dyadic_overlap_experiment(s.map, s.region, ApproxFn::power(1.0), 8, 10, s.consts),
        std::invalid_argument);
    // k0 too small for the constants scale: Q would be zero.
    CHECK_THROWS_AS(dyadic_overlap_experiment(s.map, s.region,
                                              ApproxFn::clamped(0.5, ApproxFn::power(1.0)), 2, 10,
                                              s.consts),
                    std::invalid_argument);
}

TEST_CASE("dyadic_overlap_experiment: single block ratio equals |E_k|") {
    Setup s;
    auto Psi = ApproxFn::clamped(0.5, ApproxFn::power(1.0));
    auto rep = dyadic_overlap_experiment(s.map, s.region, Psi, 10, 10, s.consts);
    CHECK(rep.ratio == doctest::Approx(rep.block_measures[0]).epsilon(1e-12));
    CHECK(rep.overlap_at(10, 10) == doctest::Approx(rep.block_measures[0]).epsilon(1e-12));
}

TEST_CASE("dyadic_overlap_experiment: divergent Psi keeps the ratio positive and stable") {
    Setup s;
    auto Psi = ApproxFn::clamped(0.5, ApproxFn::power(1.0));
    auto rep = dyadic_overlap_experiment(s.map, s.region, Psi, 8, 12, s.consts);
    CHECK(rep.ratio > 0.0);
    // Diagonal equals block measures; overlap matrix symmetric and non-negative.
    for (int l = rep.k0; l <= rep.K; ++l) {
        CHECK(rep.overlap_at(l, l) == doctest::Approx(rep.block_measures[l - rep.k0]));
        for (int k = rep.k0; k <= rep.K; ++k) {
            CHECK(rep.overlap_at(l, k) >= 0.0);
            CHECK(rep.overlap_at(l, k) == doctest::Approx(rep.overlap_at(k, l)));
        }
    }
    // phi_k = 2^k Psi(2^k) = 1/2 under the clamp.
    for (double phi : rep.phi_k) CHECK(phi == doctest::Approx(0.5));
    // ratio <= sum |E_k| since the denominator dominates its diagonal.
    double total = 0.0;
    for (double e : rep.block_measures) total += e;
    CHECK(rep.ratio <= total + 1e-12);
}

TEST_CASE("dyadic_overlap_experiment: convergent Psi keeps the blocks summable") {
    Setup s;
    // Psi = h^-3 decays fast: block masses shrink geometrically and the
    // ratio stays bounded by their (small) sum.
    auto rep_conv = dyadic_overlap_experiment(s.map, s.region, ApproxFn::power(3.0), 8, 12, s.consts);
    double total_conv = 0.0;
    for (double e : rep_conv.block_measures) total_conv += e;
    CHECK(rep_conv.ratio <= total_conv + 1e-12);
    auto rep_div = dyadic_overlap_experiment(s.map, s.region,
                                             ApproxFn::clamped(0.5, ApproxFn::power(1.0)), 8, 12,
                                             s.consts);
    double total_div = 0.0;
    for (double e : rep_div.block_measures) total_div += e;
    CHECK(total_conv < 0.05 * total_div);  // convergent-regime mass is tiny
    CHECK(rep_conv.ratio < rep_div.ratio);
    // Block masses tail off along k in the convergent regime (the earliest
    // scales can be empty, so compare the last block against the peak).
    size_t W = rep_conv.block_measures.size();
    double peak = 0.0;
    for (size_t i = 0; i + 1 < W; ++i) peak = std::max(peak, rep_conv.block_measures[i]);
    CHECK(rep_conv.block_measures[W - 1] < peak);
}

TEST_CASE("default_k0: smallest scale with at least 10 members") {
    Setup s;
    int k0 = default_k0(s.map, s.region, s.consts, 14);
    CHECK(k0 >= 1);
    CHECK(k0 <= 14);
    double target_T = std::ldexp(1.0, k0);
    long long Q = static_cast<long long>(
        std::floor(std::pow(target_T / s.consts.C3, 1.0 / 3.0) + 1e-9));
    long long m = std::max<long long>(4096, static_cast<long long>(8.0 * s.consts.T_of_Q(Q)));
    auto cert = build_regular_system(s.map, s.region, Q, s.consts, Sampler::grid(m));
    CHECK(cert.t() >= 10);
}

TEST_CASE("dyadic blocks: sandwich and within-block disjointness") {
    Setup s;
    auto Psi = ApproxFn::clamped(0.5, ApproxFn::power(1.0));
    const int k = 11;
    double target_T = std::ldexp(1.0, k);
    long long Q = static_cast<long long>(
        std::floor(std::pow(target_T / s.consts.C3, 1.0 / 3.0) + 1e-9));
    auto cert = build_regular_system(s.map, s.region, Q, s.consts,
                                     Sampler::grid(static_cast<long long>(8.0 * s.consts.T_of_Q(Q))));
    REQUIRE(cert.t() >= 3);
    double gamma = Psi(target_T);
    REQUIRE(gamma < 1.0 / cert.T);

    auto verify = verify_certificate(cert, s.map, {gamma});
    CHECK(verify.violations.empty());

    IntervalSet block;
    double piece_sum = 0.0;
    for (const auto& m : cert.members) {
        IntervalSet piece =
            tube_intervals_1d(s.map, m.R, m.z[0] - m.ball_radius, m.z[0] + m.ball_radius, gamma);
        double pm = piece.measure();
        piece_sum += pm;
        // Two-sided sandwich at gamma = Psi(2^k), s = 0, with the empirical
        // constants from the verification pass.
        CHECK(pm >= verify.K2_hat * gamma - 1e-15);
        CHECK(pm <= verify.K3_hat * gamma + 1e-15);
        for (auto& seg : piece.segments()) block.add(seg.first, seg.second);
    }
    // Within-block disjointness: pieces live in disjoint balls.
    CHECK(block.measure() == doctest::Approx(piece_sum).epsilon(1e-12));
}

TEST_CASE("limsup membership: points covered at every truncation level approximate members") {
    Setup s;
    auto Psi = ApproxFn::clamped(0.5, ApproxFn::power(1.0));
    const int k0 = 8, K = 12;
    std::vector<IntervalSet> blocks;
    std::vector<RegularSystemCertificate> certs;
    std::vector<double> gammas;
    for (int k = k0; k <= K; ++k) {
        double target_T = std::ldexp(1.0, k);
        long long Q = static_cast<long long>(
            std::floor(std::pow(target_T / s.consts.C3, 1.0 / 3.0) + 1e-9));
        auto cert = build_regular_system(
            s.map, s.region, Q, s.consts,
            Sampler::grid(static_cast<long long>(8.0 * s.consts.T_of_Q(Q))));
        double gamma = Psi(target_T);
        IntervalSet block;
        for (const auto& m : cert.members) {
            IntervalSet piece = tube_intervals_1d(s.map, m.R, m.z[0] - m.ball_radius,
                                                  m.z[0] + m.ball_radius, gamma);
            for (auto& seg : piece.segments()) block.add(seg.first, seg.second);
        }
        blocks.push_back(std::move(block));
        certs.push_back(std::move(cert));
        gammas.push_back(gamma);
    }
    // E_trunc = intersection over k of (union of E_j, j >= k).
    IntervalSet tail = blocks.back();
    std::vector<IntervalSet> tails(blocks.size());
    for (int i = static_cast<int>(blocks.size()) - 1; i >= 0; --i) {
        IntervalSet u = blocks[i];
        if (i + 1 < static_cast<int>(blocks.size()))
            for (auto& seg : tails[i + 1].segments()) u.add(seg.first, seg.second);
        tails[i] = u;
    }
    IntervalSet trunc = tails[0];
    for (size_t i = 1; i < tails.size(); ++i) trunc = IntervalSet::intersection(trunc, tails[i]);
    REQUIRE(trunc.measure() > 0.0);

    // Sample points of the truncated limsup set; each must lie within
    // Psi(N(R)) of some member R with N(R) <= 2^K.
    Rng rng(61);
    int checked = 0;
    for (int trial = 0; trial < 2000 && checked < 50; ++trial) {
        double x = rng.uniform(s.region.lo(), s.region.hi());
        if (!trunc.contains(x)) continue;
        ++checked;
        bool witnessed = false;
        for (size_t i = 0; i < certs.size() && !witnessed; ++i) {
            for (const auto& m : certs[i].members) {
                if (std::abs(x - m.z[0]) > m.ball_radius + gammas[i]) continue;
                Poly F = form_poly_1d(s.map, m.R.form);
                double psi_n = Psi(m.R.weight_N);
                auto roots = poly_roots(F, x - psi_n, x + psi_n);
                if (!roots.roots.empty()) {
                    witnessed = true;
                    break;
                }
            }
        }
        CHECK(witnessed);
    }
    CHECK(checked >= 20);
}
