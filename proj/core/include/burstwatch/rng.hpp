#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace burstwatch {

// Deterministic sampling built directly on mt19937_64. The std::*_distribution
// wrappers are implementation-defined, so every sampler here is hand-rolled to
// keep byte-identical output across library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    double normal(double mean, double stddev) {
        if (have_spare_) {
            have_spare_ = false;
            return mean + stddev * spare_;
        }
        double u1 = 0.0;
        do {
            u1 = next_unit();
        } while (u1 <= 1e-300);
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return mean + stddev * r * std::cos(theta);
    }

    double lognormal(double mu, double sigma) { return std::exp(normal(mu, sigma)); }

    /// Knuth below lambda=64, rounded Gaussian approximation above.
    int poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        if (lambda < 64.0) {
            const double limit = std::exp(-lambda);
            int k = 0;
            double p = 1.0;
            do {
                ++k;
                p *= next_unit();
            } while (p > limit);
            return k - 1;
        }
        const double x = normal(lambda, std::sqrt(lambda));
        return x < 0.0 ? 0 : static_cast<int>(std::llround(x));
    }

    /// Pick index from unnormalized non-negative weights.
    std::size_t weighted_pick(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double r = next_unit() * total;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            r -= weights[i];
            if (r < 0.0) return i;
        }
        return weights.empty() ? 0 : weights.size() - 1;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace burstwatch
