#pragma once

#include <cstdint>
#include <random>

namespace linfsindy {

/// Seedable generator used everywhere randomness enters the pipeline.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The uniform and Gaussian transforms are implemented here rather
/// than taken from <random>, whose distributions are allowed to differ between
/// standard library implementations. Gaussian draws use the polar Box-Muller
/// (Marsaglia) method with the spare value cached.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();
    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Standard normal draw.
    double gaussian();
    double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace linfsindy
