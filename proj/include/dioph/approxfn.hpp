#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "dioph/common.hpp"

namespace dioph {

// Non-increasing, strictly positive error function psi (and its transforms).
class ApproxFn {
  public:
    enum class Family { power, powerlog, table, clamped, big_psi };

    static ApproxFn power(double tau) {
        ApproxFn f(Family::power);
        f.tau_ = tau;
        return f;
    }

    // h -> h^-tau * log(h+e)^-sigma; the +e offset keeps values positive at h=1.
    static ApproxFn power_log(double tau, double sigma) {
        ApproxFn f(Family::powerlog);
        f.tau_ = tau;
        f.sigma_ = sigma;
        return f;
    }

    // Samples at h = 1, 2, ..., step-interpolated, extended by the last value.
    static ApproxFn table(std::vector<double> samples) {
        if (samples.empty()) throw std::invalid_argument("ApproxFn::table: empty");
        for (size_t i = 0; i < samples.size(); ++i) {
            if (!(samples[i] > 0.0)) throw std::invalid_argument("ApproxFn::table: values must be positive");
            if (i > 0 && samples[i] > samples[i - 1])
                throw std::invalid_argument("ApproxFn::table: values must be non-increasing");
        }
        ApproxFn f(Family::table);
        f.table_ = std::move(samples);
        return f;
    }

    // h -> min(c * h^-1, inner(h)).
    static ApproxFn clamped(double c, ApproxFn inner) {
        if (!(c > 0.0)) throw std::invalid_argument("ApproxFn::clamped: c must be positive");
        ApproxFn f(Family::clamped);
        f.c_ = c;
        f.inner_ = std::make_shared<ApproxFn>(std::move(inner));
        return f;
    }

    Family family() const { return family_; }
    double tau() const { return tau_; }
    double sigma() const { return sigma_; }
    double clamp_c() const { return c_; }
    const std::vector<double>& table_values() const { return table_; }
    const ApproxFn* inner() const { return inner_.get(); }
    int transform_n() const { return n_; }
    int transform_d() const { return d_; }
    double transform_L2() const { return L2_; }

    double operator()(double h) const {
        if (!(h > 0.0)) throw std::invalid_argument("ApproxFn: argument must be positive");
        switch (family_) {
            case Family::power:
                return std::pow(h, -tau_);
            case Family::powerlog:
                return std::pow(h, -tau_) * std::pow(std::log(h + M_E), -sigma_);
            case Family::table: {
                size_t i = h < 1.0 ? 0 : static_cast<size_t>(std::floor(h)) - 1;
                if (i >= table_.size()) i = table_.size() - 1;
                return table_[i];
            }
            case Family::clamped:
                return std::min(c_ / h, (*inner_)(h));
            case Family::big_psi:
                return std::pow(h, -1.0 / (n_ + 1)) * (*inner_)(std::pow(h, double(n_) / (n_ + 1))) /
                       (d_ * n_ * L2_);
        }
        return 0.0;
    }

    std::string describe() const {
        switch (family_) {
            case Family::power:
                return "power(tau=" + std::to_string(tau_) + ")";
            case Family::powerlog:
                return "powerlog(tau=" + std::to_string(tau_) + ",sigma=" + std::to_string(sigma_) + ")";
            case Family::table:
                return "table(" + std::to_string(table_.size()) + " samples)";
            case Family::clamped:
                return "clamped(c=" + std::to_string(c_) + "," + inner_->describe() + ")";
            case Family::big_psi:
                return "bigpsi(n=" + std::to_string(n_) + ",d=" + std::to_string(d_) +
                       ",L2=" + std::to_string(L2_) + "," + inner_->describe() + ")";
        }
        return "?";
    }

    friend ApproxFn transform_to_big_psi(ApproxFn psi, int n, int d, double L2);

  private:
    explicit ApproxFn(Family f) : family_(f) {}
    Family family_;
    double tau_ = 0.0, sigma_ = 0.0, c_ = 0.0;
    std::vector<double> table_;
    std::shared_ptr<const ApproxFn> inner_;
    int n_ = 0, d_ = 0;
    double L2_ = 0.0;
};

// Psi with d*n*L2 * h * Psi(h^{n+1}) = psi(h^n), i.e.
// Psi(k) = k^{-1/(n+1)} * psi(k^{n/(n+1)}) / (d*n*L2). Non-increasing since
// psi is.
inline ApproxFn transform_to_big_psi(ApproxFn psi, int n, int d, double L2) {
    if (n < 1 || d < 1 || !(L2 > 0.0))
        throw std::invalid_argument("transform_to_big_psi: need n,d >= 1 and L2 > 0");
    ApproxFn f(ApproxFn::Family::big_psi);
    f.n_ = n;
    f.d_ = d;
    f.L2_ = L2;
    f.inner_ = std::make_shared<ApproxFn>(std::move(psi));
    return f;
}

inline double eval_psi(const ApproxFn& f, double h) { return f(h); }

enum class SeriesOutcome { diverges, converges, undetermined };

inline const char* to_string(SeriesOutcome v) {
    switch (v) {
        case SeriesOutcome::diverges: return "diverges";
        case SeriesOutcome::converges: return "converges";
        case SeriesOutcome::undetermined: return "undetermined";
    }
    return "?";
}

struct SeriesVerdict {
    SeriesOutcome verdict = SeriesOutcome::undetermined;
    double partial_sum_at_budget = 0.0;
    double dyadic_partial_sum = 0.0;
    // Sub-verdicts from the two summation routes; they must never contradict.
    SeriesOutcome direct_verdict = SeriesOutcome::undetermined;
    SeriesOutcome dyadic_verdict = SeriesOutcome::undetermined;
};

namespace detail {

inline bool ratios_below(const std::vector<double>& terms, double threshold) {
    const size_t W = 8;
    if (terms.size() < W + 1) return false;
    for (size_t i = terms.size() - W; i < terms.size(); ++i)
        if (terms[i - 1] <= 0.0 || terms[i] / terms[i - 1] >= threshold) return false;
    return true;
}

// Convergence = geometric decay of the last 8 terms (ratios < conv_threshold);
// divergence = partial sum past 1e3, or terms sustained >= 1e-3 while the
// decay is not geometric at div_guard. Block sums of a monotone series run
// slightly hotter than the leading dyadic term, so the direct route uses a
// conv_threshold below the dyadic 0.95; log-boundary families then land in
// `undetermined` on that route instead of contradicting the dyadic verdict.
inline SeriesOutcome classify_terms(const std::vector<double>& terms, double partial_sum,
                                    double conv_threshold, double div_guard) {
    if (ratios_below(terms, conv_threshold)) return SeriesOutcome::converges;
    if (partial_sum > 1e3) return SeriesOutcome::diverges;
    const size_t W = 8;
    if (terms.size() >= W && !ratios_below(terms, div_guard)) {
        bool sustained = true;
        for (size_t i = terms.size() - W; i < terms.size(); ++i)
            if (terms[i] < 1e-3) sustained = false;
        if (sustained) return SeriesOutcome::diverges;
    }
    return SeriesOutcome::undetermined;
}

}  // namespace detail

// Three-valued convergence heuristic for sum_h h^{d-s-1} f^{d-s}(h), computed
// directly up to `budget` and dyadically up to log2(budget). The two routes
// converge or diverge simultaneously for non-increasing f, and so must the
// computed sub-verdicts.
inline SeriesVerdict classify_series(const ApproxFn& f, int d, double s, long long budget) {
    if (!(s >= 0.0) || !(s < d)) throw std::invalid_argument("classify_series: need 0 <= s < d");
    if (budget < (1 << 10)) throw std::invalid_argument("classify_series: budget >= 2^10 required");

    const double e = d - s;  // exponent d-s
    SeriesVerdict out;

    // Direct sum with per-dyadic-block increments; an incomplete final block
    // would distort the ratio statistics and is left out of the block list.
    const bool unit_exp = e == 1.0;
    std::vector<double> block_sums;
    double sum = 0.0, block = 0.0;
    long long next_boundary = 2;
    for (long long h = 1; h <= budget; ++h) {
        double fh = f(static_cast<double>(h));
        double term = unit_exp ? fh
                               : std::pow(static_cast<double>(h), e - 1.0) * std::pow(fh, e);
        sum += term;
        block += term;
        if (h + 1 == next_boundary) {
            block_sums.push_back(block);
            block = 0.0;
            next_boundary *= 2;
        }
    }
    out.partial_sum_at_budget = sum;

    std::vector<double> dyadic_terms;
    double dsum = 0.0;
    for (long long p = 1; p <= budget; p *= 2) {
        double term = std::pow(static_cast<double>(p), e) * std::pow(f(static_cast<double>(p)), e);
        dyadic_terms.push_back(term);
        dsum += term;
    }
    out.dyadic_partial_sum = dsum;

    out.direct_verdict = detail::classify_terms(block_sums, sum, 0.94, 0.95);
    out.dyadic_verdict = detail::classify_terms(dyadic_terms, dsum, 0.95, 0.95);
    out.verdict = out.dyadic_verdict != SeriesOutcome::undetermined ? out.dyadic_verdict
                                                                    : out.direct_verdict;
    return out;
}

}  // namespace dioph
