#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "dioph/intervals.hpp"
#include "dioph/poly.hpp"

namespace dioph {

struct RootResult {
    std::vector<double> roots;
    // Set when a root coincides with a critical point (multiplicity >= 2
    // within tolerance) or when the polynomial vanishes identically.
    bool degenerate = false;
};

namespace detail {

inline double refine_sign_change(const Poly& p, const Poly& dp, double u, double v) {
    double fu = p(u);
    if (fu == 0.0) return u;
    // Bisection to ~1e-14 relative width, then a couple of Newton polish steps.
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (u + v);
        if (mid == u || mid == v) break;
        double fm = p(mid);
        if (fm == 0.0) return mid;
        if ((fu > 0.0) == (fm > 0.0)) {
            u = mid;
            fu = fm;
        } else {
            v = mid;
        }
        if (v - u < 1e-14 * (1.0 + std::abs(u))) break;
    }
    double x = 0.5 * (u + v);
    for (int it = 0; it < 3; ++it) {
        double d = dp(x);
        if (d == 0.0) break;
        double step = p(x) / d;
        double y = x - step;
        if (y < u || y > v) break;
        x = y;
    }
    return x;
}

}  // namespace detail

// All real roots of p in [lo, hi]. Monotone pieces between critical points
// are bracketed by sign change, so no root is missed; tangential (even
// multiplicity) roots are detected at critical points and flagged.
inline RootResult poly_roots(const Poly& p, double lo, double hi) {
    RootResult res;
    if (!(hi > lo)) return res;
    if (p.is_zero()) {
        res.degenerate = true;  // vanishes identically on the interval
        return res;
    }
    if (p.degree() == 0) return res;

    const double ftol = 1e-11 * (1.0 + p.abs_bound(lo, hi));
    const Poly dp = p.derivative();

    std::vector<double> pts;
    pts.push_back(lo);
    if (p.degree() >= 2) {
        RootResult crit = poly_roots(dp, lo, hi);
        for (double c : crit.roots)
            if (c > lo && c < hi) pts.push_back(c);
    }
    pts.push_back(hi);
    std::sort(pts.begin(), pts.end());

    auto push_root = [&](double r, bool deg) {
        if (!res.roots.empty() && std::abs(r - res.roots.back()) <= 1e-12 * (1.0 + std::abs(r)))
            return;
        res.roots.push_back(r);
        if (deg) res.degenerate = true;
    };

    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        double u = pts[i], v = pts[i + 1];
        double fu = p(u), fv = p(v);
        bool u_zero = std::abs(fu) <= ftol;
        bool v_zero = std::abs(fv) <= ftol;
        if (u_zero) {
            // Interior breakpoints are critical points: zero there means a
            // multiple root. The endpoints lo/hi are plain roots.
            push_root(u, i != 0);
            continue;  // the sign on (u, v) is determined by fv alone
        }
        if (v_zero) continue;  // handled as the u of the next segment, or hi below
        if ((fu > 0.0) != (fv > 0.0)) push_root(detail::refine_sign_change(p, dp, u, v), false);
    }
    double fhi = p(hi);
    if (std::abs(fhi) <= ftol) push_root(hi, false);

    std::sort(res.roots.begin(), res.roots.end());
    return res;
}

// Exact length of {x in [lo, hi] : |p(x)| <= alpha} (measure-level; the
// boundary {|p| = alpha} is finite for nonconstant p).
inline IntervalSet sublevel_intervals(const Poly& p, double lo, double hi, double alpha) {
    IntervalSet out;
    if (!(hi > lo)) return out;
    std::vector<double> cuts{lo, hi};
    for (double shift : {-alpha, alpha}) {
        Poly q = p;
        q += shift;
        for (double r : poly_roots(q, lo, hi).roots) cuts.push_back(r);
    }
    std::sort(cuts.begin(), cuts.end());
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        double u = cuts[i], v = cuts[i + 1];
        if (!(v > u)) continue;
        double mid = 0.5 * (u + v);
        if (std::abs(p(mid)) <= alpha) out.add(u, v);
    }
    return out;
}

inline double sublevel_measure(const Poly& p, double lo, double hi, double alpha) {
    return sublevel_intervals(p, lo, hi, alpha).measure();
}

// Sign-change bisection for a generic callable on [lo, hi]. Returns a point
// with |f| <= f_tol when the endpoint signs differ (or an endpoint is already
// within tolerance); nullopt otherwise.
template <class F>
std::optional<double> bisect_sign_change(F&& f, double lo, double hi, double f_tol,
                                         int max_iter = 200) {
    double flo = f(lo), fhi = f(hi);
    if (std::abs(flo) <= f_tol) return lo;
    if (std::abs(fhi) <= f_tol) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) return std::nullopt;
    double u = lo, v = hi, fu = flo;
    for (int it = 0; it < max_iter; ++it) {
        double mid = 0.5 * (u + v);
        double fm = f(mid);
        if (std::abs(fm) <= f_tol || mid == u || mid == v) return mid;
        if ((fu > 0.0) == (fm > 0.0)) {
            u = mid;
            fu = fm;
        } else {
            v = mid;
        }
    }
    return 0.5 * (u + v);
}

}  // namespace dioph
