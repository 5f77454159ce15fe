#pragma once

#include <algorithm>
#include <utility>
#include <vector>

namespace dioph {

// Finite unions of intervals on the line with exact sweep-merge arithmetic.
// Endpoint openness is ignored: all operations are measure-level.
class IntervalSet {
  public:
    void add(double lo, double hi) {
        if (!(hi > lo)) return;
        segs_.emplace_back(lo, hi);
        normalized_ = false;
    }

    void add_clipped(double lo, double hi, double clip_lo, double clip_hi) {
        add(std::max(lo, clip_lo), std::min(hi, clip_hi));
    }

    void normalize() {
        if (normalized_) return;
        std::sort(segs_.begin(), segs_.end());
        std::vector<std::pair<double, double>> out;
        out.reserve(segs_.size());
        for (auto& s : segs_) {
            if (!out.empty() && s.first <= out.back().second)
                out.back().second = std::max(out.back().second, s.second);
            else
                out.push_back(s);
        }
        segs_ = std::move(out);
        normalized_ = true;
    }

    // Keeps memory bounded during million-interval accumulation.
    void compact_if_larger_than(size_t cap) {
        if (segs_.size() > cap) normalize();
    }

    double measure() const {
        const_cast<IntervalSet*>(this)->normalize();
        double m = 0.0;
        for (auto& s : segs_) m += s.second - s.first;
        return m;
    }

    size_t piece_count() const {
        const_cast<IntervalSet*>(this)->normalize();
        return segs_.size();
    }

    const std::vector<std::pair<double, double>>& segments() const {
        const_cast<IntervalSet*>(this)->normalize();
        return segs_;
    }

    bool contains(double x) const {
        const_cast<IntervalSet*>(this)->normalize();
        auto it = std::upper_bound(segs_.begin(), segs_.end(), std::make_pair(x, 1e308));
        if (it == segs_.begin()) return false;
        --it;
        return x >= it->first && x <= it->second;
    }

    static double intersection_measure(const IntervalSet& a, const IntervalSet& b) {
        const auto& u = a.segments();
        const auto& v = b.segments();
        double m = 0.0;
        size_t i = 0, j = 0;
        while (i < u.size() && j < v.size()) {
            double lo = std::max(u[i].first, v[j].first);
            double hi = std::min(u[i].second, v[j].second);
            if (hi > lo) m += hi - lo;
            if (u[i].second < v[j].second)
                ++i;
            else
                ++j;
        }
        return m;
    }

    static IntervalSet intersection(const IntervalSet& a, const IntervalSet& b) {
        const auto& u = a.segments();
        const auto& v = b.segments();
        IntervalSet out;
        size_t i = 0, j = 0;
        while (i < u.size() && j < v.size()) {
            double lo = std::max(u[i].first, v[j].first);
            double hi = std::min(u[i].second, v[j].second);
            if (hi > lo) out.add(lo, hi);
            if (u[i].second < v[j].second)
                ++i;
            else
                ++j;
        }
        return out;
    }

  private:
    std::vector<std::pair<double, double>> segs_;
    bool normalized_ = true;
};

}  // namespace dioph
