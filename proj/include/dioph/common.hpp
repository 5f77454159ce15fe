#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dioph {

using Vec = std::vector<double>;
using MultiIndex = std::vector<int>;

inline constexpr const char* kVersion = "0.1.0";

// |x|^p for small non-negative integer p, exact for integer-valued doubles.
inline double ipow(double x, int p) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= x;
    return r;
}

inline long long illpow(long long x, int p) {
    long long r = 1;
    for (int i = 0; i < p; ++i) r *= x;
    return r;
}

inline double linf_norm(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline long long linf_norm(const std::vector<long long>& v) {
    long long m = 0;
    for (long long x : v) m = std::max(m, std::llabs(x));
    return m;
}

inline double l2_norm(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double l2_dist(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// Lebesgue volume of the unit Euclidean ball in dimension d.
// d = 0 yields 1 (counting measure of a point), matching the K2 convention.
inline double unit_ball_volume(int d) {
    if (d < 0) throw std::invalid_argument("unit_ball_volume: d < 0");
    return std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

struct Ball {
    Vec center;
    double radius = 0.0;

    Ball() = default;
    Ball(Vec c, double r) : center(std::move(c)), radius(r) {
        if (center.empty()) throw std::invalid_argument("Ball: empty center");
        if (!(radius > 0.0)) throw std::invalid_argument("Ball: radius must be positive");
    }
    static Ball interval(double lo, double hi) {
        if (!(hi > lo)) throw std::invalid_argument("Ball::interval: hi <= lo");
        return Ball({(lo + hi) / 2.0}, (hi - lo) / 2.0);
    }

    int dim() const { return static_cast<int>(center.size()); }
    double diameter() const { return 2.0 * radius; }
    double volume() const { return unit_ball_volume(dim()) * std::pow(radius, dim()); }
    double lo() const { return center.at(0) - radius; }  // d = 1
    double hi() const { return center.at(0) + radius; }

    // lambda * B keeps the center (scales the radius only).
    Ball scaled(double lambda) const { return Ball(center, lambda * radius); }

    bool contains(const Vec& x) const { return l2_dist(x, center) < radius; }
};

}  // namespace dioph
