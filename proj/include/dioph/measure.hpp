#pragma once

#include <algorithm>
#include <cmath>
#include <string>
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

namespace detail {

// Exact union of {x in [lo,hi] : exists a, 0 < |a|_inf <= Q, |<a.f(x)>| < delta}
// for d = 1 maps. For each form a and each reachable integer level m, the
// solution set of |a.f(x) + m| < delta is isolated from the two boundary
// polynomials; the union is sweep-merged. Forms come in +/- pairs defining
// the same set, so only the half-box with positive leading coefficient is
// enumerated.
inline IntervalSet limsup_intervals_1d(const ManifoldMap& map, double lo, double hi, double delta,
                                       long long Q) {
    const int n = map.ambient_dim();
    std::vector<Poly> coord_polys(n);
    for (int i = 0; i < n; ++i) coord_polys[i] = map.coord(i).to_univariate();

    // Half box, ascending lex, leading nonzero component positive.
    std::vector<std::vector<long long>> half_box;
    std::vector<long long> bounds(n, Q);
    for_box_lex(bounds, [&](const std::vector<long long>& a) {
        for (long long v : a) {
            if (v > 0) {
                half_box.push_back(a);
                break;
            }
            if (v < 0) break;
        }
        return false;
    });

    const int n_chunks = std::max(1, std::min<int>(64, static_cast<int>(half_box.size())));
    std::vector<IntervalSet> partial(n_chunks);
    parallel_chunks(n_chunks, [&](int ci) {
        IntervalSet& segs = partial[ci];
        size_t begin = half_box.size() * ci / n_chunks;
        size_t end = half_box.size() * (ci + 1) / n_chunks;
        for (size_t idx = begin; idx < end; ++idx) {
            const auto& av = half_box[idx];
            Poly g;
            for (int i = 0; i < n; ++i)
                if (av[i] != 0) g.add_scaled(coord_polys[i], static_cast<double>(av[i]));
            double bound = g.abs_bound(lo, hi);
            long long m_lo = static_cast<long long>(std::ceil(-bound - delta));
            long long m_hi = static_cast<long long>(std::floor(bound + delta));
            for (long long m = m_lo; m <= m_hi; ++m) {
                Poly gm = g;
                gm += static_cast<double>(m);
                IntervalSet piece = sublevel_intervals(gm, lo, hi, delta);
                for (const auto& seg : piece.segments()) segs.add(seg.first, seg.second);
            }
            segs.compact_if_larger_than(1 << 20);
        }
    });
    IntervalSet out;
    for (const auto& p : partial)
        for (const auto& seg : p.segments()) out.add(seg.first, seg.second);
    out.normalize();
    return out;
}

}  // namespace detail

// |L_f(B; eps; Q)|: measure of {x in region : exists a, 0 < |a|_inf <= Q,
// |<f(x).a>| < eps Q^{-n}}.
inline MeasureEstimate limsup_set_measure(const ManifoldMap& map, const Ball& region, double eps,
                                          long long Q, Method method, MCParams mc = {}) {
    if (!(eps > 0.0)) throw std::invalid_argument("limsup_set_measure: eps must be positive");
    if (Q < 1) throw std::invalid_argument("limsup_set_measure: Q >= 1 required");
    const double delta = eps * std::pow(static_cast<double>(Q), -map.ambient_dim());
    MeasureEstimate est;
    est.method = method;
    if (method == Method::exact1d) {
        if (map.domain_dim() != 1)
            throw std::invalid_argument("limsup_set_measure: exact1d requires d = 1");
        if (delta > 0.5) {  // |<t>| <= 1/2 always: the whole region qualifies
            est.value = region.volume();
            return est;
        }
        est.value = detail::limsup_intervals_1d(map, region.lo(), region.hi(), delta, Q).measure();
        return est;
    }
    if (mc.samples < 1) throw std::invalid_argument("limsup_set_measure: samples >= 1 required");
    est.samples = mc.samples;
    est.seed = mc.seed;
    const long long chunk_size = 16384;
    const int n_chunks = static_cast<int>((mc.samples + chunk_size - 1) / chunk_size);
    std::vector<long long> hits(n_chunks, 0);
    parallel_chunks(n_chunks, [&](int ci) {
        Rng rng = Rng::substream(mc.seed, static_cast<uint64_t>(ci));
        long long count = std::min(chunk_size, mc.samples - ci * chunk_size);
        long long h = 0;
        for (long long s = 0; s < count; ++s) {
            Vec x = rng.uniform_in_ball(region);
            if (has_solution(map.eval(x), Q, delta)) ++h;
        }
        hits[ci] = h;
    });
    long long total = 0;
    for (long long h : hits) total += h;
    double p = static_cast<double>(total) / static_cast<double>(mc.samples);
    double vol = region.volume();
    est.value = p * vol;
    est.std_error = vol * std::sqrt(p * (1.0 - p) / static_cast<double>(mc.samples));
    return est;
}

struct ScalingRow {
    double eps = 0.0;
    MeasureEstimate estimate;
    double c0_ratio = 0.0;  // measure / (eps * |B|)
};

struct ScalingReport {
    double slope = 0.0;    // least-squares slope of log(measure) vs log(eps)
    double C0_hat = 0.0;   // max over the grid of measure / (eps |B|)
    std::vector<ScalingRow> rows;
    long long Q = 0;
    long long Q1 = 0;
    long long q_floor = 0;
    bool below_q_floor = false;
};

// Empirical check of the linear-in-eps bound |L_f| <= C0 eps |B|.
inline ScalingReport verify_linear_scaling(const ManifoldMap& map, const Ball& region,
                                           const std::vector<double>& eps_grid, long long Q,
                                           Method method, MCParams mc = {},
                                           long long q_floor_factor = 16) {
    std::vector<double> grid = eps_grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (grid.size() < 2) throw std::invalid_argument("verify_linear_scaling: degenerate eps grid");
    for (double e : grid)
        if (!(e > 0.0)) throw std::invalid_argument("verify_linear_scaling: eps must be positive");

    ScalingReport rep;
    rep.Q = Q;
    DerivBounds db = map.derivative_bounds(region);
    DomainConstants consts = DomainConstants::from_c0(1.0, db, map.ambient_dim(), map.domain_dim(), region);
    rep.Q1 = consts.Q1;
    rep.q_floor = q_floor_factor * consts.Q1;
    rep.below_q_floor = Q < rep.q_floor;

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double vol = region.volume();
    for (double eps : grid) {
        ScalingRow row;
        row.eps = eps;
        row.estimate = limsup_set_measure(map, region, eps, Q, method, mc);
        row.c0_ratio = row.estimate.value / (eps * vol);
        rep.C0_hat = std::max(rep.C0_hat, row.c0_ratio);
        rep.rows.push_back(row);
        double lx = std::log(eps), ly = std::log(std::max(row.estimate.value, 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double m = static_cast<double>(grid.size());
    rep.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return rep;
}

struct SplitReport {
    MeasureEstimate big;
    MeasureEstimate small;
    MeasureEstimate total;
    long long big_hits = 0;
    long long small_hits = 0;
};

// Monte Carlo split of the limsup set by the gradient size of the first
// witness: big iff |a grad f(x)|_inf >= sqrt(n d L1 Q). A point counts once,
// in the class of its lexicographically-first witness.
inline SplitReport split_big_small(const ManifoldMap& map, const Ball& region, double eps,
                                   long long Q, MCParams mc) {
    if (!(eps > 0.0)) throw std::invalid_argument("split_big_small: eps must be positive");
    if (Q < 1) throw std::invalid_argument("split_big_small: Q >= 1 required");
    if (mc.samples < 1) throw std::invalid_argument("split_big_small: samples >= 1 required");
    const int n = map.ambient_dim(), d = map.domain_dim();
    DerivBounds db = map.derivative_bounds(region);
    if (!(db.L1 > 0.0)) throw std::invalid_argument("split_big_small: L1 > 0 required");
    const double delta = eps * std::pow(static_cast<double>(Q), -n);
    const double grad_threshold = std::sqrt(static_cast<double>(n) * d * db.L1 * static_cast<double>(Q));

    const long long chunk_size = 16384;
    const int n_chunks = static_cast<int>((mc.samples + chunk_size - 1) / chunk_size);
    std::vector<long long> big_hits(n_chunks, 0), small_hits(n_chunks, 0);
    parallel_chunks(n_chunks, [&](int ci) {
        Rng rng = Rng::substream(mc.seed, static_cast<uint64_t>(ci));
        long long count = std::min(chunk_size, mc.samples - ci * chunk_size);
        for (long long s = 0; s < count; ++s) {
            Vec x = rng.uniform_in_ball(region);
            auto witness = first_solution(map.eval(x), Q, delta);
            if (!witness) continue;
            auto J = map.jacobian(x);
            double g = 0.0;
            for (int j = 0; j < d; ++j) {
                double col = 0.0;
                for (int i = 0; i < n; ++i) col += static_cast<double>((*witness)[i]) * J[i][j];
                g = std::max(g, std::abs(col));
            }
            if (g >= grad_threshold)
                ++big_hits[ci];
            else
                ++small_hits[ci];
        }
    });
    long long nb = 0, ns = 0;
    for (int i = 0; i < n_chunks; ++i) {
        nb += big_hits[i];
        ns += small_hits[i];
    }
    const double vol = region.volume();
    auto mk = [&](long long h) {
        MeasureEstimate e;
        e.method = Method::montecarlo;
        e.samples = mc.samples;
        e.seed = mc.seed;
        double p = static_cast<double>(h) / static_cast<double>(mc.samples);
        e.value = p * vol;
        e.std_error = vol * std::sqrt(p * (1.0 - p) / static_cast<double>(mc.samples));
        return e;
    };
    SplitReport rep;
    rep.big = mk(nb);
    rep.small = mk(ns);
    rep.total = mk(nb + ns);
    rep.big_hits = nb;
    rep.small_hits = ns;
    return rep;
}

}  // namespace dioph
