#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace coco {

// Deterministic RNG with explicit bit-to-double mapping, so streams are
// reproducible across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    double uniform01() {
        return static_cast<double>(bits() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    std::uint64_t below(std::uint64_t n) { return bits() % n; }

    double normal() {
        // Marsaglia polar method; one value per call, spare discarded.
        for (;;) {
            double a = uniform(-1.0, 1.0), b = uniform(-1.0, 1.0);
            double s = a * a + b * b;
            if (s > 0.0 && s < 1.0) return a * std::sqrt(-2.0 * std::log(s) / s);
        }
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace coco
