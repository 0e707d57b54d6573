#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hsvm {

// Deterministic normal sampler. std::normal_distribution is
// implementation-defined, so we roll Box-Muller on top of mt19937_64 to get
// the same stream on every platform.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = unit();
        double u2 = unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    // Uniform in (0, 1].
    double unit() {
        return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Fixed per-class/per-purpose stream offsets so substreams stay reproducible
// independent of how many of them a caller draws.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t idx) {
    return seed + idx * 0x9E3779B97F4A7C15ULL;
}

}  // namespace hsvm
