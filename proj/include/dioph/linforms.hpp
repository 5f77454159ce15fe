#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dioph/common.hpp"

namespace dioph {

// <t>: the representative of t mod 1 in (-1/2, 1/2]. |<t>| is the distance
// to the nearest integer.
inline double residue(double t) {
    double r = t - std::nearbyint(t);
    if (r <= -0.5) r += 1.0;
    return r;
}

// Nearest integer consistent with the residue convention: t - residue(t).
inline long long nearest_int(double t) { return std::llround(t - residue(t)); }

struct IntegerForm {
    std::vector<long long> a;
    long long a0 = 0;

    IntegerForm() = default;
    IntegerForm(std::vector<long long> av, long long a0v) : a(std::move(av)), a0(a0v) {
        if (a.empty()) throw std::invalid_argument("IntegerForm: empty a");
        if (linf_norm(a) == 0) throw std::invalid_argument("IntegerForm: a must be nonzero");
    }
    int n() const { return static_cast<int>(a.size()); }
    long long sup_norm() const { return linf_norm(a); }
};

// Box of the Minkowski system: |f(x).a + a0| <= delta, |a1| <= a1_bound,
// |a_i| <= ai_bound for i >= 2. With these bounds the volume of the
// (n+1)-dimensional body equals 2^{n+1} exactly.
struct MinkowskiBox {
    double delta = 0.0;
    double a1_bound = 0.0;
    double ai_bound = 0.0;

    static MinkowskiBox from_constants(long long Q, double C0, int n, double L2) {
        if (Q < 1) throw std::invalid_argument("MinkowskiBox: Q >= 1 required");
        if (!(C0 > 0.0) || !(L2 > 0.0)) throw std::invalid_argument("MinkowskiBox: C0, L2 > 0 required");
        MinkowskiBox b;
        b.delta = 1.0 / (4.0 * C0) * std::pow(static_cast<double>(Q), -n);
        b.a1_bound = 4.0 * C0 * ipow(n * L2, n - 1) * static_cast<double>(Q);
        b.ai_bound = static_cast<double>(Q) / (n * L2);
        return b;
    }
};

inline double dot(const Vec& y, const std::vector<long long>& a) {
    double s = 0.0;
    for (size_t i = 0; i < y.size(); ++i) s += y[i] * static_cast<double>(a[i]);
    return s;
}

namespace detail {

// Iterates integer vectors over the box |a_i| <= bounds[i] in ascending
// lexicographic order (a1 slowest), calling fn(a) for each a != 0.
// fn returns true to stop early.
template <class F>
bool for_box_lex(const std::vector<long long>& bounds, F&& fn) {
    int n = static_cast<int>(bounds.size());
    std::vector<long long> a(n);
    for (int i = 0; i < n; ++i) a[i] = -bounds[i];
    for (;;) {
        bool zero = true;
        for (long long v : a)
            if (v != 0) {
                zero = false;
                break;
            }
        if (!zero && fn(a)) return true;
        int i = n - 1;
        while (i >= 0 && a[i] == bounds[i]) {
            a[i] = -bounds[i];
            --i;
        }
        if (i < 0) return false;
        ++a[i];
    }
}

// Outward value sequence 0, +1, -1, +2, -2, ..., up to |v| <= bound.
inline long long outward_value(long long t) { return (t % 2 == 1) ? (t + 1) / 2 : -(t / 2); }

}  // namespace detail

// All a with 0 < |a|_inf <= Q and |<fx.a>| < threshold, ascending
// lexicographic order. Both a and -a are reported when both qualify.
inline std::vector<std::vector<long long>> enumerate_solutions(const Vec& fx, long long Q,
                                                               double threshold) {
    if (Q < 1) throw std::invalid_argument("enumerate_solutions: Q >= 1 required");
    if (!(threshold > 0.0)) throw std::invalid_argument("enumerate_solutions: threshold must be positive");
    std::vector<std::vector<long long>> out;
    std::vector<long long> bounds(fx.size(), Q);
    detail::for_box_lex(bounds, [&](const std::vector<long long>& a) {
        if (std::abs(residue(dot(fx, a))) < threshold) out.push_back(a);
        return false;
    });
    return out;
}

// Early-exit membership test used by Monte Carlo measure sampling.
inline bool has_solution(const Vec& fx, long long Q, double threshold) {
    std::vector<long long> bounds(fx.size(), Q);
    return detail::for_box_lex(bounds, [&](const std::vector<long long>& a) {
        return std::abs(residue(dot(fx, a))) < threshold;
    });
}

// Lexicographically-first qualifying a, if any.
inline std::optional<std::vector<long long>> first_solution(const Vec& fx, long long Q,
                                                            double threshold) {
    std::optional<std::vector<long long>> hit;
    std::vector<long long> bounds(fx.size(), Q);
    detail::for_box_lex(bounds, [&](const std::vector<long long>& a) {
        if (std::abs(residue(dot(fx, a))) < threshold) {
            hit = a;
            return true;
        }
        return false;
    });
    return hit;
}

struct MinkowskiFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Minkowski linear-forms solution at fx: the first nonzero integer a in the
// documented scan order (coordinates swept outward from zero, positive value
// first, a1 innermost over its larger range) with a0 = -nearest_int(fx.a)
// satisfying all three box constraints. Existence is guaranteed because the
// box volume equals 2^{n+1}; a miss indicates an internal error.
inline std::pair<IntegerForm, MinkowskiBox> minkowski_solve(const Vec& fx, long long Q, double C0,
                                                            double L2) {
    const int n = static_cast<int>(fx.size());
    if (n < 1) throw std::invalid_argument("minkowski_solve: empty point");
    MinkowskiBox box = MinkowskiBox::from_constants(Q, C0, n, L2);
    const long long A1 = static_cast<long long>(std::floor(box.a1_bound + 1e-9));
    const long long Ai = static_cast<long long>(std::floor(box.ai_bound + 1e-9));

    std::vector<long long> a(n, 0);
    // Outer loop over (a2..an) outward, inner loop over a1 outward.
    long long outer_card = 1;
    for (int i = 1; i < n; ++i) outer_card *= 2 * Ai + 1;
    for (long long outer = 0; outer < outer_card; ++outer) {
        long long rem = outer;
        for (int i = 1; i < n; ++i) {
            a[i] = detail::outward_value(rem % (2 * Ai + 1));
            rem /= 2 * Ai + 1;
        }
        double tail = 0.0;
        for (int i = 1; i < n; ++i) tail += fx[i] * static_cast<double>(a[i]);
        for (long long t1 = 0; t1 <= 2 * A1; ++t1) {
            a[0] = detail::outward_value(t1);
            if (a[0] == 0) {
                bool zero = true;
                for (int i = 1; i < n; ++i)
                    if (a[i] != 0) zero = false;
                if (zero) continue;
            }
            double v = fx[0] * static_cast<double>(a[0]) + tail;
            if (std::abs(residue(v)) <= box.delta)
                return {IntegerForm(a, -nearest_int(v)), box};
        }
    }
    throw MinkowskiFailure("minkowski_solve: no lattice point in the box (should not happen)");
}

}  // namespace dioph
