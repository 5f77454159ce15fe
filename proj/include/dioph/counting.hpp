#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "dioph/approxfn.hpp"
#include "dioph/common.hpp"
#include "dioph/linforms.hpp"
#include "dioph/manifold.hpp"
#include "dioph/parallel.hpp"
#include "dioph/rng.hpp"

namespace dioph {

struct Witness {
    std::vector<long long> a;
    long long a0 = 0;
};

struct CountResult {
    long long count = 0;
    std::vector<Witness> witnesses;  // ordered by (shell |a|_inf, lex), capped
};

namespace detail {

// Per-shell hit counts for h = 1..Q_max in one pass over the box; psi is
// evaluated once per shell. The threshold argument is psi(h^n), or psi(h)
// under the legacy convention.
struct ShellScan {
    std::vector<long long> per_shell;  // index h-1
    std::vector<Witness> witnesses;
};

inline ShellScan shell_scan(const ManifoldMap& map, const Vec& x, const ApproxFn& psi,
                            long long Q_max, bool legacy_arg, int witness_cap) {
    const int n = map.ambient_dim();
    Vec y = map.eval(x);
    std::vector<double> thr(Q_max + 1, 0.0);
    for (long long h = 1; h <= Q_max; ++h)
        thr[h] = psi(legacy_arg ? static_cast<double>(h) : ipow(static_cast<double>(h), n));

    ShellScan out;
    out.per_shell.assign(Q_max, 0);

    // Bounded best-10 by (shell, enumeration index): max-heap evicts the worst.
    using Key = std::pair<long long, long long>;  // (shell, lex index)
    struct HeapEntry {
        Key key;
        Witness w;
    };
    auto by_key = [](const HeapEntry& u, const HeapEntry& v) { return u.key < v.key; };
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, decltype(by_key)> best(by_key);

    long long lex_idx = 0;
    std::vector<long long> bounds(n, Q_max);
    for_box_lex(bounds, [&](const std::vector<long long>& a) {
        ++lex_idx;
        double v = dot(y, a);
        long long h = linf_norm(a);
        if (std::abs(residue(v)) < thr[h]) {
            ++out.per_shell[h - 1];
            if (witness_cap > 0) {
                Key key{h, lex_idx};
                if (static_cast<int>(best.size()) < witness_cap)
                    best.push(HeapEntry{key, Witness{a, -nearest_int(v)}});
                else if (key < best.top().key) {
                    best.pop();
                    best.push(HeapEntry{key, Witness{a, -nearest_int(v)}});
                }
            }
        }
        return false;
    });

    std::vector<HeapEntry> tmp;
    while (!best.empty()) {
        tmp.push_back(best.top());
        best.pop();
    }
    std::sort(tmp.begin(), tmp.end(), by_key);
    for (auto& e : tmp) out.witnesses.push_back(std::move(e.w));
    return out;
}

}  // namespace detail

// Number of a with 0 < |a|_inf <= Q_max and |<f(x).a>| < psi(|a|_inf^n).
inline CountResult count_solutions(const ManifoldMap& map, const Vec& x, const ApproxFn& psi,
                                   long long Q_max, bool legacy_arg = false, int witness_cap = 10) {
    if (Q_max < 1) throw std::invalid_argument("count_solutions: Q_max >= 1 required");
    detail::ShellScan scan = detail::shell_scan(map, x, psi, Q_max, legacy_arg, witness_cap);
    CountResult res;
    for (long long c : scan.per_shell) res.count += c;
    res.witnesses = std::move(scan.witnesses);
    return res;
}

struct SurveySample {
    Vec x;
    long long count = 0;
    std::vector<Witness> witnesses;
};

struct CountSurvey {
    std::string map_id;
    std::string psi_id;
    Ball region;
    long long Q_max = 0;
    uint64_t seed = 0;
    std::vector<SurveySample> samples;
    double median = 0.0, q10 = 0.0, q90 = 0.0;
};

namespace detail {

inline double nearest_rank(std::vector<long long> v, double p) {
    std::sort(v.begin(), v.end());
    size_t idx = static_cast<size_t>(std::ceil(p * static_cast<double>(v.size())));
    if (idx > 0) --idx;
    if (idx >= v.size()) idx = v.size() - 1;
    return static_cast<double>(v[idx]);
}

}  // namespace detail

// One pass per sample at the largest ladder point; counts at the smaller
// ladder points are prefix sums over shells, so the surveys share samples.
inline std::vector<CountSurvey> survey_ladder(const ManifoldMap& map, const Ball& region,
                                              const ApproxFn& psi, std::vector<long long> ladder,
                                              int n_samples, uint64_t seed,
                                              bool legacy_arg = false) {
    if (n_samples < 1) throw std::invalid_argument("survey: n_samples >= 1 required");
    if (ladder.empty()) throw std::invalid_argument("survey: empty Q ladder");
    std::sort(ladder.begin(), ladder.end());
    if (ladder.front() < 1) throw std::invalid_argument("survey: Q_max >= 1 required");
    const long long Q_top = ladder.back();

    Rng rng(seed);
    std::vector<Vec> xs(n_samples);
    for (int i = 0; i < n_samples; ++i) xs[i] = rng.uniform_in_ball(region);

    std::vector<detail::ShellScan> scans(n_samples);
    const int chunk = 4;
    const int n_chunks = (n_samples + chunk - 1) / chunk;
    parallel_chunks(n_chunks, [&](int ci) {
        int begin = ci * chunk, end = std::min(n_samples, begin + chunk);
        for (int i = begin; i < end; ++i)
            scans[i] = detail::shell_scan(map, xs[i], psi, Q_top, legacy_arg, 10);
    });

    std::vector<CountSurvey> out;
    for (long long Q : ladder) {
        CountSurvey sv;
        sv.map_id = map.id();
        sv.psi_id = psi.describe();
        sv.region = region;
        sv.Q_max = Q;
        sv.seed = seed;
        std::vector<long long> counts(n_samples);
        for (int i = 0; i < n_samples; ++i) {
            long long c = 0;
            for (long long h = 1; h <= Q; ++h) c += scans[i].per_shell[h - 1];
            counts[i] = c;
            SurveySample samp;
            samp.x = xs[i];
            samp.count = c;
            for (const auto& w : scans[i].witnesses)
                if (linf_norm(w.a) <= Q) samp.witnesses.push_back(w);
            sv.samples.push_back(std::move(samp));
        }
        sv.median = detail::nearest_rank(counts, 0.5);
        sv.q10 = detail::nearest_rank(counts, 0.1);
        sv.q90 = detail::nearest_rank(counts, 0.9);
        out.push_back(std::move(sv));
    }
    return out;
}

inline CountSurvey survey(const ManifoldMap& map, const Ball& region, const ApproxFn& psi,
                          long long Q_max, int n_samples, uint64_t seed, bool legacy_arg = false) {
    return survey_ladder(map, region, psi, {Q_max}, n_samples, seed, legacy_arg).front();
}

}  // namespace dioph
