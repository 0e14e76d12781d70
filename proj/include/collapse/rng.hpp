#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace collapse {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Stateless:
/// the output is a pure function of (key, counter).
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter generate(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Gaussian increments keyed by (seed, trajectory, step). Any increment can be
/// regenerated in isolation, so scheduling order never affects results.
class NoiseStream {
public:
    NoiseStream(std::uint64_t seed, std::uint64_t trajectory)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          trajectory_(trajectory) {}

    /// Standard normal variate for the given step.
    double normal(std::uint64_t step) const {
        const auto r = Philox4x32::generate({static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
                                             static_cast<std::uint32_t>(trajectory_),
                                             static_cast<std::uint32_t>(trajectory_ >> 32)},
                                            key_);
        const double u1 = to_open_unit((std::uint64_t{r[0]} << 32) | r[1]);
        const double u2 = to_open_unit((std::uint64_t{r[2]} << 32) | r[3]);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    // 53 random bits mapped to (0, 1).
    static double to_open_unit(std::uint64_t bits) { return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53; }

    Philox4x32::Key key_;
    std::uint64_t trajectory_;
};

}  // namespace collapse
