// rng.hpp
//
// Philox4x32-10 counter-based generator (Salmon et al., Random123). Every
// stream is addressed by (seed, trial, stream id) so trials can be drawn in
// any order, on any thread, with identical results.
#pragma once
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace pbc {

class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            ctr = single_round(ctr, key);
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        return ctr;
    }

private:
    static Counter single_round(const Counter& c, const Key& k) {
        const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c[0];
        const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t trial, std::uint32_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          trial_(trial),
          stream_(stream) {}

    std::uint64_t next_u64() {
        if (used_ == 2) refill();
        return buffer_[used_++];
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1p-53; }

    // Uniform on (0, 1].
    double uniform_open0() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1p-53; }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_open0()));
        const double angle = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(angle);
        has_spare_ = true;
        return r * std::cos(angle);
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    void refill() {
        const Philox4x32::Counter ctr{block_++, stream_, static_cast<std::uint32_t>(trial_),
                                      static_cast<std::uint32_t>(trial_ >> 32)};
        const auto out = Philox4x32::generate(ctr, key_);
        buffer_[0] = (std::uint64_t{out[0]} << 32) | out[1];
        buffer_[1] = (std::uint64_t{out[2]} << 32) | out[3];
        used_ = 0;
    }

    Philox4x32::Key key_;
    std::uint64_t trial_;
    std::uint32_t stream_;
    std::uint32_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int used_ = 2;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Stream ids used by the harness.
namespace streams {
inline constexpr std::uint32_t dataset = 0;
inline constexpr std::uint32_t model_draw = 1;
inline constexpr std::uint32_t oracle = 2;
inline constexpr std::uint32_t bootstrap = 3;
} // namespace streams

} // namespace pbc
