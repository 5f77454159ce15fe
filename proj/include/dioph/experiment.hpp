#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "dioph/approxfn.hpp"
#include "dioph/counting.hpp"
#include "dioph/regsys.hpp"
#include "dioph/resonant.hpp"

namespace dioph {

struct ImplicationStats {
    long long events = 0;      // sampled (x, member) pairs with dist(x, z) < Psi(N)
    long long violations = 0;  // events where |<f(x).a>| >= psi(|a|_inf^n)
    long long members_used = 0;
};

// Pointwise check of the mean-value implication: whenever
// dist(x, z) < Psi(|a|_inf^{n+1}) for a certificate member (a, a0, z),
// then |<f(x).a>| < psi(|a|_inf^n), with Psi the transform of psi at the
// same L2.
inline ImplicationStats check_mean_value_implication(const ManifoldMap& map,
                                                     const RegularSystemCertificate& cert,
                                                     const ApproxFn& psi, long long events,
                                                     uint64_t seed) {
    const int n = map.ambient_dim(), d = map.domain_dim();
    ApproxFn Psi = transform_to_big_psi(psi, n, d, cert.consts.L2);
    ImplicationStats stats;
    if (cert.members.empty() || events <= 0) return stats;
    stats.members_used = static_cast<long long>(cert.members.size());
    Rng rng(seed);
    for (long long e = 0; e < events; ++e) {
        const Member& m = cert.members[static_cast<size_t>(rng.next_u64() % cert.members.size())];
        double radius = Psi(m.R.weight_N);
        Vec x = m.z;
        // Uniform in the open ball of radius Psi(N) around the anchor.
        for (int j = 0; j < d; ++j) x[j] += radius * (2.0 * rng.uniform() - 1.0) * 0.999999;
        double lhs = std::abs(residue(dot(map.eval(x), m.R.form.a)));
        double rhs = psi(ipow(static_cast<double>(m.R.form.sup_norm()), n));
        ++stats.events;
        if (!(lhs < rhs)) ++stats.violations;
    }
    return stats;
}

struct KhintchineConfig {
    std::vector<ApproxFn> psis;
    std::vector<long long> Q_ladder;
    int n_samples = 200;
    uint64_t seed = 7;
    long long series_budget = 1 << 20;
    long long implication_events = 200;
    long long implication_Q = 8;
    double construction_C3 = 64.0;
};

struct KhintchineRow {
    std::string psi;
    SeriesVerdict series;              // verdict on sum psi(h)
    std::vector<CountSurvey> surveys;  // one per ladder point, shared samples
    ImplicationStats implication;
};

struct KhintchineReport {
    std::vector<KhintchineRow> rows;  // divergent-psi rows first
};

// Per psi: series verdict for sum psi(h), count surveys over the Q ladder,
// and the mean-value implication check against a freshly built certificate.
inline KhintchineReport khintchine_experiment(const ManifoldMap& map, const Ball& region,
                                              const KhintchineConfig& cfg) {
    if (!cfg.psis.empty() && cfg.Q_ladder.empty())
        throw std::invalid_argument("khintchine_experiment: empty Q ladder");
    KhintchineReport rep;
    DerivBounds db = map.derivative_bounds(region);
    DomainConstants consts = DomainConstants::construction_scale(
        cfg.construction_C3, db, map.ambient_dim(), map.domain_dim(), region);
    RegularSystemCertificate cert;
    if (!cfg.psis.empty()) {
        long long m = std::max<long long>(4096,
                                          static_cast<long long>(8.0 * consts.T_of_Q(cfg.implication_Q)));
        cert = build_regular_system(map, region, cfg.implication_Q, consts, Sampler::grid(m));
    }
    for (const ApproxFn& psi : cfg.psis) {
        KhintchineRow row;
        row.psi = psi.describe();
        row.series = classify_series(psi, 1, 0.0, cfg.series_budget);
        row.surveys = survey_ladder(map, region, psi, cfg.Q_ladder, cfg.n_samples, cfg.seed);
        row.implication =
            check_mean_value_implication(map, cert, psi, cfg.implication_events, cfg.seed + 1);
        rep.rows.push_back(std::move(row));
    }
    std::stable_sort(rep.rows.begin(), rep.rows.end(), [](const auto& a, const auto& b) {
        auto rank = [](const KhintchineRow& r) {
            switch (r.series.verdict) {
                case SeriesOutcome::diverges: return 0;
                case SeriesOutcome::converges: return 1;
                case SeriesOutcome::undetermined: return 2;
            }
            return 3;
        };
        return rank(a) < rank(b);
    });
    return rep;
}

}  // namespace dioph
