#pragma once

#include <cstdint>
#include <stdexcept>

namespace dioph {

enum class Method { montecarlo, exact1d };

inline const char* to_string(Method m) { return m == Method::exact1d ? "exact1d" : "montecarlo"; }

struct MeasureEstimate {
    double value = 0.0;
    double std_error = 0.0;  // 0 for exact methods
    Method method = Method::exact1d;
    long long samples = 0;
    uint64_t seed = 0;
};

struct MCParams {
    long long samples = 0;
    uint64_t seed = 0;
};

struct TubeMethod {
    Method kind = Method::exact1d;
    long long samples = 0;
    uint64_t seed = 0;

    static TubeMethod exact1d() { return TubeMethod{Method::exact1d, 0, 0}; }
    static TubeMethod montecarlo(long long samples, uint64_t seed) {
        return TubeMethod{Method::montecarlo, samples, seed};
    }
};

}  // namespace dioph
