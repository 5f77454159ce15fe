#pragma once

#include <cstdint>

#include "dioph/common.hpp"

namespace dioph {

// splitmix64 stream. Distributions are derived from raw bits so that output
// is identical across standard libraries and compilers; reports depend on it.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    // Independent substream: mixes the stream index through one splitmix step
    // before seeding, so substream(s, i) and substream(s, j) never overlap in
    // practice for i != j.
    static Rng substream(uint64_t seed, uint64_t stream) {
        Rng mixer(seed);
        uint64_t a = mixer.next_u64();
        Rng mixer2(stream + 0x9E3779B97F4A7C15ULL);
        return Rng(a ^ mixer2.next_u64());
    }

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Uniform point in an open Euclidean ball (rejection from the cube).
    Vec uniform_in_ball(const Ball& b) {
        const int d = b.dim();
        if (d == 1) return {b.center[0] + b.radius * (2.0 * uniform() - 1.0)};
        Vec x(d);
        for (;;) {
            double s = 0.0;
            for (int i = 0; i < d; ++i) {
                double u = 2.0 * uniform() - 1.0;
                x[i] = u;
                s += u * u;
            }
            if (s < 1.0) break;
        }
        for (int i = 0; i < d; ++i) x[i] = b.center[i] + b.radius * x[i];
        return x;
    }

  private:
    uint64_t state_;
};

}  // namespace dioph
