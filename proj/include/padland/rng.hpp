#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace padland {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Each (key, counter) pair maps to four independent 32-bit words, so a random
/// stream is fully described by a key and a starting counter. No hidden state is
/// shared between streams.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter apply(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            ctr = single_round(ctr, key);
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static Counter single_round(const Counter& c, const Key& k) noexcept {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

/// A reproducible random stream identified by (seed, stream id).
///
/// Streams with different ids never overlap: the id occupies the upper half of
/// the Philox counter and the draw index the lower half. Satisfies
/// UniformRandomBitGenerator.
class Stream {
public:
    using result_type = std::uint64_t;

    Stream(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_id_(stream_id) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        if (cursor_ == 2) {
            refill();
        }
        return buffer_[cursor_++];
    }

    /// Uniform double in (0, 1], 53-bit resolution.
    double uniform_open_closed() noexcept {
        return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound); bound must be positive.
    std::uint64_t uniform_below(std::uint64_t bound) noexcept {
        // Lemire-style rejection on the high product keeps the law exact.
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t x = (*this)();
            const __uint128_t m = static_cast<__uint128_t>(x) * bound;
            if (static_cast<std::uint64_t>(m) >= threshold) {
                return static_cast<std::uint64_t>(m >> 64);
            }
        }
    }

    /// Exponential waiting time with the given rate (> 0).
    double exponential(double rate) noexcept { return -std::log(uniform_open_closed()) / rate; }

    std::uint64_t blocks_used() const noexcept { return block_; }

private:
    void refill() noexcept {
        const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_),
                                      static_cast<std::uint32_t>(block_ >> 32),
                                      static_cast<std::uint32_t>(stream_id_),
                                      static_cast<std::uint32_t>(stream_id_ >> 32)};
        const auto out = Philox4x32::apply(ctr, key_);
        buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
        buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
        ++block_;
        cursor_ = 0;
    }

    Philox4x32::Key key_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int cursor_ = 2;
};

} // namespace padland
