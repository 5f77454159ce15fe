#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dioph/approxfn.hpp"
#include "dioph/constants.hpp"
#include "dioph/estimate.hpp"
#include "dioph/intervals.hpp"
#include "dioph/manifold.hpp"
#include "dioph/parallel.hpp"
#include "dioph/resonant.hpp"
#include "dioph/rng.hpp"

namespace dioph {

struct Member {
    ResonantSet R;
    Vec z;                    // anchor, center of B_i
    double ball_radius = 0.0; // T^-1 / 2, so diam(B_i) = T^-1
};

struct RegularSystemCertificate {
    double T = 0.0;
    double lambda_T = 0.0;  // T / C3 = Q^{n+1}
    long long Q = 0;
    Ball region;
    DomainConstants consts;
    std::vector<Member> members;
    // Sampler statistics for the report: how the tried points resolved.
    long long samples_tried = 0;
    long long anchors_ok = 0;
    long long big_norm_violations = 0;  // |d1 F| <= Q/(2n) at the point
    long long no_sign_change = 0;
    long long weight_window_rejected = 0;  // N outside [lambda(T), T]
    long long boundary_rejected = 0;       // 2 B_i would leave the region

    size_t t() const { return members.size(); }
};

struct Sampler {
    enum class Kind { grid, montecarlo } kind = Kind::grid;
    long long count = 0;
    uint64_t seed = 0;

    static Sampler grid(long long m) { return {Kind::grid, m, 0}; }
    static Sampler montecarlo(long long samples, uint64_t seed) {
        return {Kind::montecarlo, samples, seed};
    }
};

namespace detail {

inline std::vector<Vec> sampler_points(const Ball& region, const Sampler& s) {
    std::vector<Vec> pts;
    pts.reserve(static_cast<size_t>(s.count));
    const int d = region.dim();
    if (s.kind == Sampler::Kind::montecarlo) {
        Rng rng(s.seed);
        for (long long i = 0; i < s.count; ++i) pts.push_back(rng.uniform_in_ball(region));
        return pts;
    }
    if (d == 1) {
        double lo = region.lo(), len = region.diameter();
        for (long long i = 0; i < s.count; ++i)
            pts.push_back({lo + (static_cast<double>(i) + 0.5) * len / static_cast<double>(s.count)});
        return pts;
    }
    long long per_axis = static_cast<long long>(std::ceil(std::pow(static_cast<double>(s.count), 1.0 / d)));
    std::vector<long long> idx(d, 0);
    Vec x(d);
    for (;;) {
        for (int j = 0; j < d; ++j) {
            double lo = region.center[j] - region.radius;
            x[j] = lo + (idx[j] + 0.5) * region.diameter() / static_cast<double>(per_axis);
        }
        if (region.contains(x)) pts.push_back(x);
        int j = 0;
        while (j < d && ++idx[j] == per_axis) idx[j++] = 0;
        if (j == d) break;
    }
    return pts;
}

}  // namespace detail

// Greedy maximal packing of anchored resonant sets at scale T = C3 Q^{n+1}.
// Sample points where the anchor construction succeeds supply candidate
// members (R, z); z is accepted iff N(R) lies in [T/C3, T], 2 B(z, T^-1/2)
// stays inside the region, and B(z, T^-1/2) is disjoint from all accepted
// balls. Greedy order is the sampler order, which makes the packing maximal
// over the sampled candidates.
inline RegularSystemCertificate build_regular_system(const ManifoldMap& map, const Ball& region,
                                                     long long Q, const DomainConstants& consts,
                                                     const Sampler& sampler) {
    if (!map.first_coordinate_chart())
        throw std::invalid_argument("build_regular_system: map must have the first-coordinate chart");
    if (Q < consts.Q0) throw std::invalid_argument("build_regular_system: Q below consts.Q0");
    if (sampler.count < 1) throw std::invalid_argument("build_regular_system: empty sampler");
    if (!map.nondeg_order(region.center, 8))
        throw std::invalid_argument("build_regular_system: map degenerate at the region center");

    RegularSystemCertificate cert;
    cert.Q = Q;
    cert.T = consts.T_of_Q(Q);
    cert.lambda_T = ipow(static_cast<double>(Q), consts.n + 1);
    cert.region = region;
    cert.consts = consts;

    const double Tinv = 1.0 / cert.T;
    std::vector<Vec> pts = detail::sampler_points(region, sampler);
    cert.samples_tried = static_cast<long long>(pts.size());

    struct Candidate {
        ResonantSet R;
        Vec z;
    };
    enum class Outcome : uint8_t { accepted, big_norm, no_sign, weight_window, boundary };
    std::vector<std::optional<Candidate>> cands(pts.size());
    std::vector<Outcome> outcomes(pts.size());
    const size_t chunk_size = 4096;
    const int n_chunks = static_cast<int>((pts.size() + chunk_size - 1) / chunk_size);
    parallel_chunks(n_chunks, [&](int ci) {
        size_t begin = static_cast<size_t>(ci) * chunk_size;
        size_t end = std::min(pts.size(), begin + chunk_size);
        for (size_t i = begin; i < end; ++i) {
            AnchorResult ar = anchor_for_point(map, pts[i], Q, consts);
            if (ar.status == AnchorStatus::big_norm_violation) {
                outcomes[i] = Outcome::big_norm;
                continue;
            }
            if (ar.status == AnchorStatus::no_sign_change) {
                outcomes[i] = Outcome::no_sign;
                continue;
            }
            const ResonantSet& R = *ar.R;
            if (R.weight_N < cert.lambda_T || R.weight_N > cert.T) {
                outcomes[i] = Outcome::weight_window;  // not a good point
                continue;
            }
            const Vec& z = ar.anchor->z;
            if (l2_dist(z, region.center) > region.radius - Tinv) {
                outcomes[i] = Outcome::boundary;  // 2B_i must fit in B
                continue;
            }
            outcomes[i] = Outcome::accepted;
            cands[i] = Candidate{R, z};
        }
    });
    for (Outcome o : outcomes) {
        switch (o) {
            case Outcome::big_norm: ++cert.big_norm_violations; break;
            case Outcome::no_sign: ++cert.no_sign_change; break;
            case Outcome::weight_window: ++cert.weight_window_rejected; break;
            case Outcome::boundary: ++cert.boundary_rejected; break;
            case Outcome::accepted: break;
        }
    }

    // Sequential greedy accept in sampler order.
    std::multiset<double> accepted_1d;
    for (auto& c : cands) {
        if (!c) continue;
        ++cert.anchors_ok;
        bool disjoint = true;
        if (map.domain_dim() == 1) {
            double z0 = c->z[0];
            auto it = accepted_1d.lower_bound(z0);
            if (it != accepted_1d.end() && *it - z0 < Tinv) disjoint = false;
            if (it != accepted_1d.begin() && z0 - *std::prev(it) < Tinv) disjoint = false;
        } else {
            for (const auto& m : cert.members)
                if (l2_dist(m.z, c->z) < Tinv) {
                    disjoint = false;
                    break;
                }
        }
        if (!disjoint) continue;
        cert.members.push_back(Member{std::move(c->R), c->z, Tinv / 2.0});
        if (map.domain_dim() == 1) accepted_1d.insert(cert.members.back().z[0]);
    }
    return cert;
}

struct VerifyGammaRow {
    double gamma = 0.0;
    double K2_hat = 0.0;
    double K3_hat = 0.0;
};

struct VerifyReport {
    double K1_hat = 0.0;
    double K2_hat = 0.0;  // min over members and gammas
    double K3_hat = 0.0;  // max over members and gammas
    std::vector<VerifyGammaRow> per_gamma;
    std::vector<std::string> violations;
};

// Independent recheck of the certificate invariants plus empirical tube
// constants over the given gamma grid (each gamma must satisfy 0 < gamma <
// T^-1, the range of the definition). s = d-1 throughout.
inline VerifyReport verify_certificate(const RegularSystemCertificate& cert, const ManifoldMap& map,
                                       const std::vector<double>& gammas) {
    const double Tinv = 1.0 / cert.T;
    for (double g : gammas)
        if (!(g > 0.0) || !(g < Tinv))
            throw std::invalid_argument("verify_certificate: gamma must lie in (0, T^-1)");

    VerifyReport rep;
    const int d = map.domain_dim();
    auto complain = [&](size_t i, const std::string& what) {
        rep.violations.push_back("member " + std::to_string(i) + ": " + what);
    };

    for (size_t i = 0; i < cert.members.size(); ++i) {
        const Member& m = cert.members[i];
        double N = ipow(static_cast<double>(m.R.form.sup_norm()), cert.consts.n + 1);
        if (N != m.R.weight_N) complain(i, "stored weight differs from |a|_inf^{n+1}");
        if (N < cert.lambda_T || N > cert.T) complain(i, "weight outside [lambda(T), T]");
        if (std::abs(2.0 * m.ball_radius - Tinv) > 1e-15 * std::max(1.0, Tinv))
            complain(i, "ball diameter differs from T^-1");
        if (l2_dist(m.z, cert.region.center) > cert.region.radius - Tinv + 1e-15)
            complain(i, "2B_i not inside the region");
        double Fz = form_value(map, m.R, m.z);
        if (std::abs(Fz) > 10.0 * default_zero_tol(m.R.form)) complain(i, "anchor not on the resonant set");
    }

    // Pairwise ball disjointness via a sweep on the first coordinate.
    std::vector<size_t> order(cert.members.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return cert.members[a].z[0] < cert.members[b].z[0];
    });
    for (size_t oi = 0; oi < order.size(); ++oi) {
        for (size_t oj = oi + 1; oj < order.size(); ++oj) {
            const Member& a = cert.members[order[oi]];
            const Member& b = cert.members[order[oj]];
            if (b.z[0] - a.z[0] >= Tinv) break;  // sorted: no later overlap possible on axis 0
            if (l2_dist(a.z, b.z) < Tinv)
                complain(order[oi], "ball overlaps member " + std::to_string(order[oj]));
        }
    }

    rep.K1_hat = static_cast<double>(cert.members.size()) /
                 (cert.region.volume() * std::pow(cert.T, d));

    rep.K2_hat = std::numeric_limits<double>::infinity();
    rep.K3_hat = 0.0;
    const int s = d - 1;
    for (double gamma : gammas) {
        VerifyGammaRow row;
        row.gamma = gamma;
        row.K2_hat = std::numeric_limits<double>::infinity();
        row.K3_hat = 0.0;
        double denom = std::pow(gamma, d - s) * std::pow(cert.T, -s);
        for (size_t i = 0; i < cert.members.size(); ++i) {
            const Member& m = cert.members[i];
            double inner, outer;
            if (d == 1) {
                bool deg1 = false, deg2 = false;
                inner = tube_intervals_1d(map, m.R, m.z[0] - m.ball_radius, m.z[0] + m.ball_radius,
                                          gamma, &deg1)
                            .measure();
                outer = tube_intervals_1d(map, m.R, m.z[0] - 2.0 * m.ball_radius,
                                          m.z[0] + 2.0 * m.ball_radius, gamma, &deg2)
                            .measure();
                if (deg1 || deg2) complain(i, "degenerate root in tube window");
            } else {
                Ball bi(m.z, m.ball_radius);
                Ball bi2(m.z, 2.0 * m.ball_radius);
                inner = tube_measure(map, m.R, bi, gamma, TubeMethod::montecarlo(20000, 17)).value;
                outer = tube_measure(map, m.R, bi2, gamma, TubeMethod::montecarlo(20000, 18)).value;
            }
            row.K2_hat = std::min(row.K2_hat, inner / denom);
            row.K3_hat = std::max(row.K3_hat, outer / denom);
        }
        rep.K2_hat = std::min(rep.K2_hat, row.K2_hat);
        rep.K3_hat = std::max(rep.K3_hat, row.K3_hat);
        rep.per_gamma.push_back(row);
    }
    return rep;
}

struct OverlapReport {
    int k0 = 0;
    int K = 0;
    std::vector<long long> Q_k;
    std::vector<double> T_k;       // realized T' = C3 Q_k^{n+1}
    std::vector<long long> t_k;
    std::vector<double> block_measures;  // |E_k|
    std::vector<double> phi_k;           // 2^{(d-s)k} Psi^{d-s}(2^k)
    std::vector<double> overlap;         // (K-k0+1)^2, row-major (l, k)
    double ratio = 0.0;                  // (sum |E_k|)^2 / sum sum |E_l cap E_k|
    double ratio_over_region = 0.0;

    double overlap_at(int l, int k) const {
        int w = K - k0 + 1;
        return overlap[static_cast<size_t>(l - k0) * w + (k - k0)];
    }
};

// Default starting scale: the smallest k <= K whose certificate reaches
// t >= 10 members (the "sufficiently large k0" is existential).
inline int default_k0(const ManifoldMap& map, const Ball& region, const DomainConstants& consts,
                      int K, double oversample = 8.0) {
    for (int k = 1; k <= K; ++k) {
        double target_T = std::ldexp(1.0, k);
        long long Q = static_cast<long long>(
            std::floor(std::pow(target_T / consts.C3, 1.0 / (consts.n + 1)) + 1e-9));
        if (Q < std::max<long long>(1, consts.Q0)) continue;
        long long m = std::max<long long>(4096, static_cast<long long>(oversample * consts.T_of_Q(Q)));
        auto cert = build_regular_system(map, region, Q, consts, Sampler::grid(m));
        if (cert.t() >= 10) return k;
    }
    throw std::runtime_error("default_k0: no scale up to K reaches 10 members");
}

// Dyadic-block quasi-independence experiment. For each k in [k0, K] a
// certificate is built at the realized scale T' = C3 Q^{n+1} with
// Q = floor((2^k / C3)^{1/(n+1)}), blocks E_k are exact interval unions of
// tube(Psi(2^k)) cap B_i, and all pairwise intersections are swept exactly.
inline OverlapReport dyadic_overlap_experiment(const ManifoldMap& map, const Ball& region,
                                               const ApproxFn& Psi, int k0, int K,
                                               const DomainConstants& consts,
                                               double oversample = 8.0) {
    if (map.domain_dim() != 1)
        throw std::invalid_argument("dyadic_overlap_experiment: exact evaluation requires d = 1");
    if (K < k0) throw std::invalid_argument("dyadic_overlap_experiment: K >= k0 required");
    for (int k = k0; k <= K; ++k) {
        double h = std::ldexp(1.0, k);
        if (Psi(h) > 0.5 / h)
            throw std::invalid_argument(
                "dyadic_overlap_experiment: Psi violates Psi(h) <= h^-1/2; apply clamped(1/2, .) first");
    }

    const int W = K - k0 + 1;
    OverlapReport rep;
    rep.k0 = k0;
    rep.K = K;
    rep.Q_k.resize(W);
    rep.T_k.resize(W);
    rep.t_k.resize(W);
    rep.block_measures.resize(W);
    rep.phi_k.resize(W);
    rep.overlap.assign(static_cast<size_t>(W) * W, 0.0);

    const int d = map.domain_dim(), s = d - 1;
    std::vector<IntervalSet> blocks(W);
    for (int k = k0; k <= K; ++k) {
        double target_T = std::ldexp(1.0, k);
        long long Q = static_cast<long long>(
            std::floor(std::pow(target_T / consts.C3, 1.0 / (consts.n + 1)) + 1e-9));
        if (Q < 1)
            throw std::invalid_argument(
                "dyadic_overlap_experiment: k0 too small for consts.C3 (Q would be 0)");
        long long m = std::max<long long>(4096, static_cast<long long>(oversample * consts.T_of_Q(Q)));
        RegularSystemCertificate cert =
            build_regular_system(map, region, Q, consts, Sampler::grid(m));
        double gamma = Psi(target_T);
        IntervalSet block;
        for (const Member& mem : cert.members) {
            IntervalSet piece = tube_intervals_1d(map, mem.R, mem.z[0] - mem.ball_radius,
                                                  mem.z[0] + mem.ball_radius, gamma);
            for (const auto& seg : piece.segments()) block.add(seg.first, seg.second);
        }
        int i = k - k0;
        rep.Q_k[i] = Q;
        rep.T_k[i] = cert.T;
        rep.t_k[i] = static_cast<long long>(cert.t());
        rep.block_measures[i] = block.measure();
        rep.phi_k[i] = std::pow(target_T, d - s) * std::pow(gamma, d - s);
        blocks[i] = std::move(block);
    }

    double num = 0.0, den = 0.0;
    for (int l = 0; l < W; ++l) num += rep.block_measures[l];
    num *= num;
    for (int l = 0; l < W; ++l)
        for (int k = 0; k < W; ++k) {
            double v = l == k ? rep.block_measures[l]
                              : IntervalSet::intersection_measure(blocks[l], blocks[k]);
            rep.overlap[static_cast<size_t>(l) * W + k] = v;
            den += v;
        }
    rep.ratio = num / den;
    rep.ratio_over_region = rep.ratio / region.volume();
    return rep;
}

}  // namespace dioph
