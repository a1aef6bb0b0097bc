#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>

namespace emgvalid {

/// Seeded generator with platform-independent draws. The std distributions
/// are implementation-defined, so uniform and Gaussian variates are derived
/// here directly from the mt19937_64 bit stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer on [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const auto span = static_cast<double>(hi - lo + 1);
        auto v = lo + static_cast<std::int64_t>(std::floor(uniform01() * span));
        return v > hi ? hi : v;
    }

    /// Standard normal via Box-Muller.
    double gaussian() {
        if (spare_) {
            const double s = *spare_;
            spare_.reset();
            return s;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(th);
        return r * std::cos(th);
    }

    double gaussian(double mean, double sd) { return mean + sd * gaussian(); }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

}  // namespace emgvalid
