#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mimic::core {

/// mt19937-backed generator with explicit uniform/normal sampling so that
/// draws do not depend on the standard library's distribution internals.
/// Identical seeds give identical streams on every build.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0)
        : eng_(static_cast<std::uint32_t>(seed ^ (seed >> 32))), mix_(seed) {}

    std::uint32_t next_u32() { return eng_(); }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(eng_()) * (1.0 / 4294967296.0);
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        if (hi <= lo) return lo;
        auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(static_cast<std::uint64_t>(eng_()) % span);
    }

    std::size_t index(std::size_t n) {
        return n == 0 ? 0 : static_cast<std::size_t>(eng_()) % n;
    }

    /// Standard normal via Box-Muller; consumes two draws per pair.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 1e-12) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Child generator for an independent substream (e.g. per-episode seeds).
    Rng split(std::uint64_t salt) const {
        return Rng(mix_ ^ (salt * 0x9e3779b97f4a7c15ull));
    }

private:
    std::mt19937 eng_;
    std::uint64_t mix_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace mimic::core
