#include <cmath>

#include "burstwatch/features.hpp"

namespace burstwatch::features {

namespace {

// Gaussian equiprobable breakpoints, alphabet sizes 2..10.
const double* breakpoints_for(int alphabet) {
    static const double k2[] = {0.0};
    static const double k3[] = {-0.43072729929545756, 0.43072729929545744};
    static const double k4[] = {-0.67448975019608171, 0.0, 0.67448975019608171};
    static const double k5[] = {-0.84162123357291418, -0.25334710313579972,
                                0.25334710313579972, 0.8416212335729143};
    static const double k6[] = {-0.96742156610170105, -0.43072729929545756, 0.0,
                                0.43072729929545744, 0.96742156610170105};
    static const double k7[] = {-1.0675705238781414, -0.56594882193286311,
                                -0.1800123697927051, 0.18001236979270496,
                                0.56594882193286311, 1.0675705238781412};
    static const double k8[] = {-1.1503493803760079, -0.67448975019608171,
                                -0.31863936396437514, 0.0, 0.31863936396437514,
                                0.67448975019608171, 1.1503493803760079};
    static const double k9[] = {-1.2206403488473501, -0.7647096737863871,
                                -0.43072729929545756, -0.13971029888186212,
                                0.13971029888186212, 0.43072729929545744,
                                0.7647096737863871, 1.2206403488473496};
    static const double k10[] = {-1.2815515655446004, -0.84162123357291418,
                                 -0.52440051270804089, -0.25334710313579972, 0.0,
                                 0.25334710313579972, 0.52440051270804067,
                                 0.8416212335729143, 1.2815515655446004};
    switch (alphabet) {
        case 2: return k2;
        case 3: return k3;
        case 4: return k4;
        case 5: return k5;
        case 6: return k6;
        case 7: return k7;
        case 8: return k8;
        case 9: return k9;
        case 10: return k10;
    }
    return nullptr;
}

}  // namespace

void SaxConfig::validate() const {
    if (alphabet_size < 2 || alphabet_size > 10)
        throw ConfigError("SAX alphabet size must lie in [2,10]");
    if (paa_segments < 3) throw ConfigError("SAX needs >= 3 PAA segments");
}

std::string sax_encode(std::span<const int> slice, const SaxConfig& cfg) {
    cfg.validate();
    if (slice.empty()) throw ContractViolation("sax_encode needs >= 1 point");
    const std::size_t n = slice.size();
    const std::size_t segments = std::min<std::size_t>(
        static_cast<std::size_t>(cfg.paa_segments), n);

    double sum = 0.0;
    for (int v : slice) sum += v;
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (int v : slice) {
        const double d = v - mean;
        sq += d * d;
    }
    const double stddev = std::sqrt(sq / static_cast<double>(n));

    // zero-variance guard: every segment maps to the lower-middle symbol
    if (stddev < 1e-9) {
        const char middle = static_cast<char>('A' + (cfg.alphabet_size - 1) / 2);
        return std::string(segments, middle);
    }

    const double* bp = breakpoints_for(cfg.alphabet_size);
    std::string out(segments, 'A');
    for (std::size_t seg = 0; seg < segments; ++seg) {
        const std::size_t lo = seg * n / segments;
        const std::size_t hi = (seg + 1) * n / segments;
        double seg_sum = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
            seg_sum += (slice[i] - mean) / stddev;
        const double paa = seg_sum / static_cast<double>(hi - lo);
        int idx = 0;
        for (int b = 0; b < cfg.alphabet_size - 1; ++b)
            if (paa >= bp[b]) idx = b + 1;
        out[seg] = static_cast<char>('A' + idx);
    }
    return out;
}

}  // namespace burstwatch::features
