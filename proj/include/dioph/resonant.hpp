#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dioph/constants.hpp"
#include "dioph/estimate.hpp"
#include "dioph/intervals.hpp"
#include "dioph/linforms.hpp"
#include "dioph/manifold.hpp"
#include "dioph/parallel.hpp"
#include "dioph/rng.hpp"
#include "dioph/roots.hpp"

namespace dioph {

// R_{a,a0} = {x : a.f(x) + a0 = 0} with weight N = |a|_inf^{n+1}.
struct ResonantSet {
    IntegerForm form;
    double weight_N = 1.0;

    ResonantSet() = default;
    ResonantSet(IntegerForm f, int n) : form(std::move(f)) {
        weight_N = ipow(static_cast<double>(form.sup_norm()), n + 1);
    }
};

struct Anchor {
    Vec z;
    Vec source_x;
    double displacement = 0.0;
};

inline double default_zero_tol(const IntegerForm& form) {
    return 1e-12 * std::max(1.0, static_cast<double>(form.sup_norm()));
}

// F(x) = a.f(x) + a0, exact polynomial evaluation.
inline double form_value(const ManifoldMap& map, const ResonantSet& R, const Vec& x) {
    Vec y = map.eval(x);
    return dot(y, R.form.a) + static_cast<double>(R.form.a0);
}

// Univariate restriction theta -> F(x + theta * e_axis).
inline Poly form_restriction(const ManifoldMap& map, const IntegerForm& form, const Vec& x,
                             int axis = 0) {
    Poly p = Poly::constant(static_cast<double>(form.a0));
    for (int i = 0; i < map.ambient_dim(); ++i) {
        if (form.a[i] == 0) continue;
        p.add_scaled(map.coord(i).restrict_axis(x, axis), static_cast<double>(form.a[i]));
    }
    return p;
}

// Full univariate F for d = 1 maps.
inline Poly form_poly_1d(const ManifoldMap& map, const IntegerForm& form) {
    if (map.domain_dim() != 1) throw std::invalid_argument("form_poly_1d: requires d = 1");
    return form_restriction(map, form, {0.0}, 0);
}

// Searches theta in [-theta_max, theta_max] for a sign change of
// F(x1 + theta, x2, ..., xd) at the endpoints; bisects to |F| <= zero_tol.
// Absent when the endpoint signs agree.
inline std::optional<Anchor> find_zero_along_axis(const ManifoldMap& map, const ResonantSet& R,
                                                  const Vec& x, double theta_max,
                                                  std::optional<double> zero_tol = std::nullopt) {
    if (!map.first_coordinate_chart())
        throw std::invalid_argument("find_zero_along_axis: map must have the first-coordinate chart");
    if (!(theta_max > 0.0)) throw std::invalid_argument("find_zero_along_axis: theta_max > 0");
    const double tol = zero_tol.value_or(default_zero_tol(R.form));
    Poly g = form_restriction(map, R.form, x, 0);
    auto theta0 = bisect_sign_change([&](double t) { return g(t); }, -theta_max, theta_max, tol, 200);
    if (!theta0) return std::nullopt;
    Anchor a;
    a.z = x;
    a.z[0] += *theta0;
    a.source_x = x;
    a.displacement = std::abs(*theta0);
    return a;
}

enum class AnchorStatus { ok, big_norm_violation, no_sign_change };

inline const char* to_string(AnchorStatus s) {
    switch (s) {
        case AnchorStatus::ok: return "ok";
        case AnchorStatus::big_norm_violation: return "big-norm-violation";
        case AnchorStatus::no_sign_change: return "no-sign-change";
    }
    return "?";
}

struct AnchorResult {
    AnchorStatus status = AnchorStatus::no_sign_change;
    std::optional<ResonantSet> R;
    std::optional<Anchor> anchor;
};

// Proposition-1 construction at a point: Minkowski form at f(x), gradient
// precondition |d1 F(x)| > Q/(2n), then the axis zero search with
// theta_max = n/(2 C0) Q^{-n-1}. A gradient failure marks the point as
// belonging to the exceptional set rather than erroring.
inline AnchorResult anchor_for_point(const ManifoldMap& map, const Vec& x, long long Q,
                                     const DomainConstants& consts) {
    if (!map.first_coordinate_chart())
        throw std::invalid_argument("anchor_for_point: map must have the first-coordinate chart");
    if (Q < consts.Q0) throw std::invalid_argument("anchor_for_point: Q below consts.Q0");

    Vec fx = map.eval(x);
    auto [form, box] = minkowski_solve(fx, Q, consts.C0, consts.L2);
    AnchorResult res;
    res.R = ResonantSet(form, map.ambient_dim());

    Poly g = form_restriction(map, form, x, 0);
    double grad1 = g.derivative()(0.0);
    if (!(std::abs(grad1) > static_cast<double>(Q) / (2.0 * map.ambient_dim()))) {
        res.status = AnchorStatus::big_norm_violation;
        return res;
    }

    auto anchor = find_zero_along_axis(map, *res.R, x, consts.theta_max(Q));
    if (!anchor) {
        res.status = AnchorStatus::no_sign_change;
        return res;
    }
    res.anchor = std::move(*anchor);
    res.status = AnchorStatus::ok;
    return res;
}

// Union of gamma-intervals around the roots of F in [lo, hi] (roots within
// gamma of the window count), clipped to [lo, hi]. Degenerate (multiple)
// roots are reported through the flag.
inline IntervalSet tube_intervals_1d(const ManifoldMap& map, const ResonantSet& R, double lo,
                                     double hi, double gamma, bool* degenerate = nullptr) {
    Poly F = form_poly_1d(map, R.form);
    RootResult rr = poly_roots(F, lo - gamma, hi + gamma);
    if (degenerate) *degenerate = rr.degenerate;
    IntervalSet tube;
    for (double r : rr.roots) tube.add_clipped(r - gamma, r + gamma, lo, hi);
    return tube;
}

// |{x in region : dist(x, R within the local window) < gamma}|.
inline MeasureEstimate tube_measure(const ManifoldMap& map, const ResonantSet& R,
                                    const Ball& region, double gamma, const TubeMethod& method) {
    if (!(gamma > 0.0)) throw std::invalid_argument("tube_measure: gamma must be positive");
    MeasureEstimate est;
    est.method = method.kind;
    if (method.kind == Method::exact1d) {
        if (map.domain_dim() != 1) throw std::invalid_argument("tube_measure: exact1d requires d = 1");
        bool degenerate = false;
        IntervalSet tube = tube_intervals_1d(map, R, region.lo(), region.hi(), gamma, &degenerate);
        if (degenerate)
            throw std::runtime_error("tube_measure: degenerate (multiple) root of F in the window");
        est.value = tube.measure();
        return est;
    }
    // Monte Carlo: per sample, test for a zero of F along the x1-segment of
    // half-length gamma (the distance test the construction uses).
    if (method.samples < 1) throw std::invalid_argument("tube_measure: samples >= 1 required");
    est.samples = method.samples;
    est.seed = method.seed;
    const long long chunk_size = 16384;
    const int n_chunks = static_cast<int>((method.samples + chunk_size - 1) / chunk_size);
    std::vector<long long> hits(n_chunks, 0);
    parallel_chunks(n_chunks, [&](int ci) {
        Rng rng = Rng::substream(method.seed, static_cast<uint64_t>(ci));
        long long count = std::min(chunk_size, method.samples - ci * chunk_size);
        long long h = 0;
        for (long long s = 0; s < count; ++s) {
            Vec x = rng.uniform_in_ball(region);
            Poly g = form_restriction(map, R.form, x, 0);
            if (!poly_roots(g, -gamma, gamma).roots.empty()) ++h;
        }
        hits[ci] = h;
    });
    long long total = 0;
    for (long long h : hits) total += h;
    double p = static_cast<double>(total) / static_cast<double>(method.samples);
    double vol = region.volume();
    est.value = p * vol;
    est.std_error = vol * std::sqrt(p * (1.0 - p) / static_cast<double>(method.samples));
    return est;
}

}  // namespace dioph
