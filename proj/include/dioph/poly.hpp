#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "dioph/common.hpp"

namespace dioph {

// Dense univariate polynomial, coefficients in ascending degree.
class Poly {
  public:
    Poly() = default;
    explicit Poly(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }

    static Poly constant(double v) { return Poly({v}); }
    static Poly monomial(int degree, double coeff = 1.0) {
        std::vector<double> c(degree + 1, 0.0);
        c[degree] = coeff;
        return Poly(std::move(c));
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero poly
    const std::vector<double>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }

    double operator()(double x) const {
        double r = 0.0;
        for (size_t i = c_.size(); i-- > 0;) r = r * x + c_[i];
        return r;
    }

    Poly derivative() const {
        if (c_.size() <= 1) return Poly();
        std::vector<double> d(c_.size() - 1);
        for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
        return Poly(std::move(d));
    }

    Poly& operator+=(const Poly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
        for (size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
        trim();
        return *this;
    }

    Poly& add_scaled(const Poly& o, double s) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
        for (size_t i = 0; i < o.c_.size(); ++i) c_[i] += s * o.c_[i];
        trim();
        return *this;
    }

    Poly& operator+=(double v) {
        if (c_.empty()) c_.push_back(0.0);
        c_[0] += v;
        trim();
        return *this;
    }

    // Upper bound on |p| over [lo, hi] via coefficient magnitudes.
    double abs_bound(double lo, double hi) const {
        double m = std::max(std::abs(lo), std::abs(hi));
        double b = 0.0, xp = 1.0;
        for (double ci : c_) {
            b += std::abs(ci) * xp;
            xp *= m;
        }
        return b;
    }

    // Shift of variable: q(t) = p(x0 + t).
    Poly shifted(double x0) const {
        if (c_.empty()) return Poly();
        // Horner-style synthetic shift.
        std::vector<double> q(c_);
        int n = static_cast<int>(q.size());
        for (int i = 0; i < n - 1; ++i)
            for (int j = n - 2; j >= i; --j) q[j] += x0 * q[j + 1];
        return Poly(std::move(q));
    }

  private:
    void trim() {
        while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
    }
    std::vector<double> c_;
};

}  // namespace dioph
