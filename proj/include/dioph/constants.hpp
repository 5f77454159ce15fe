#pragma once

#include <cmath>
#include <stdexcept>

#include "dioph/common.hpp"
#include "dioph/manifold.hpp"

namespace dioph {

// The constants chain C0 -> C3 -> C4, C5, C6 -> K2, K3, K1 feeding the
// resonant-set construction, materialized once and reused consistently.
//
// C0 is a dial, not a derived quantity: the Minkowski box is volume-exact for
// any C0 > 0. Calibration runs report an empirical C0_hat; constructions are
// typically run at a smaller C0 so that T = C3 Q^{n+1} stays at desk scale.
struct DomainConstants {
    double C0 = 1.0;
    double L1 = 0.0;
    double L2 = 1.0;
    int n = 1;
    int d = 1;
    double C3 = 0.0;  // (4 C0 (n L2)^{n-1})^{n+1}
    double C4 = 0.0;  // C3 n / (2 C0)
    double C5 = 0.0;  // d n 4 C0 (n L2)^{n-1} L2
    double C6 = 0.0;  // min(1/8, 1/(16 (d-1) n^2 L2 C3^{1/(n+1)})); 1/8 for d = 1
    double K1 = 0.0;  // (2 |B(0, C4+1)|)^{-1}
    double K2 = 0.0;  // |B_{d-1}(0, C6)|_{d-1} / 2
    double K3 = 0.0;  // 12 n C5
    long long Q0 = 1;  // construction threshold; the proof's Q0 is existential
    long long Q1 = 1;  // [1/(n L1 (diam B)^2)] + 1
    double diam_B = 0.0;
    long long q0_strict = 1;  // conservative threshold from the continuity requirements; reported, not enforced

    static DomainConstants from_c0(double C0, const DerivBounds& bounds, int n, int d,
                                   const Ball& region, long long Q0 = 1) {
        if (!(C0 > 0.0)) throw std::invalid_argument("DomainConstants: C0 must be positive");
        if (!(bounds.L2 > 0.0)) throw std::invalid_argument("DomainConstants: L2 must be positive");
        if (n < 1 || d < 1) throw std::invalid_argument("DomainConstants: n, d >= 1");
        DomainConstants c;
        c.C0 = C0;
        c.L1 = bounds.L1;
        c.L2 = bounds.L2;
        c.n = n;
        c.d = d;
        c.diam_B = region.diameter();
        double base = 4.0 * C0 * ipow(n * c.L2, n - 1);
        c.C3 = std::pow(base, n + 1);
        c.C4 = c.C3 * n / (2.0 * C0);
        c.C5 = d * n * base * c.L2;
        c.C6 = d == 1 ? 0.125
                      : std::min(0.125, 1.0 / (16.0 * (d - 1) * n * n * c.L2 * base));
        c.K3 = 12.0 * n * c.C5;
        c.K2 = d == 1 ? 0.5 : unit_ball_volume(d - 1) * std::pow(c.C6, d - 1) / 2.0;
        c.K1 = 1.0 / (2.0 * unit_ball_volume(d) * std::pow(c.C4 + 1.0, d));
        c.Q1 = c.L1 > 0.0
                   ? static_cast<long long>(std::floor(1.0 / (n * c.L1 * c.diam_B * c.diam_B))) + 1
                   : 1;
        c.Q0 = Q0;
        double r0 = c.diam_B / 8.0;
        double q_theta = std::pow(n / (2.0 * C0 * r0), 1.0 / (n + 1));
        double q_scale = std::pow((c.C4 + 1.0) / (c.C3 * r0), 1.0 / (n + 1));
        c.q0_strict = std::max<long long>(1, static_cast<long long>(std::ceil(std::max(q_theta, q_scale))));
        return c;
    }

    // Constants whose C3 equals the given target scale:
    // C0 = C3^{1/(n+1)} / (4 (n L2)^{n-1}).
    static DomainConstants construction_scale(double C3_target, const DerivBounds& bounds, int n,
                                              int d, const Ball& region, long long Q0 = 1) {
        if (!(C3_target > 0.0)) throw std::invalid_argument("DomainConstants: C3 target must be positive");
        double c0 = std::pow(C3_target, 1.0 / (n + 1)) / (4.0 * ipow(n * bounds.L2, n - 1));
        return from_c0(c0, bounds, n, d, region, Q0);
    }

    double T_of_Q(long long Q) const { return C3 * ipow(static_cast<double>(Q), n + 1); }
    double lambda_of_T(double T) const { return T / C3; }
    // theta range of the one-dimensional zero search: n/(2 C0) Q^{-n-1}.
    double theta_max(long long Q) const {
        return n / (2.0 * C0) * std::pow(static_cast<double>(Q), -(n + 1));
    }
};

}  // namespace dioph
