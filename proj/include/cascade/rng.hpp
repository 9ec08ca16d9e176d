#pragma once

// Counter-based Philox4x32-10 generator (Salmon et al., SC'11).
// A stream is addressed by (seed, stream id); the counter walks within it, so
// independent trajectories can be generated in any order on any thread.

#include <array>
#include <cmath>
#include <cstdint>

namespace cascade {

class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Block bijection(Block ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Sequential draws from the Philox stream keyed by `seed`, with the stream
/// id placed in the upper counter words.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream_id) {}

    std::uint64_t next_u64() {
        if (pos_ == 2) refill();
        return buf_[pos_++];
    }

    /// Uniform on (0, 1], never zero, 53 random bits.
    double uniform_open0() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log(uniform_open0()) / rate; }

private:
    void refill() {
        const Philox4x32::Block ctr{static_cast<std::uint32_t>(counter_),
                                    static_cast<std::uint32_t>(counter_ >> 32),
                                    static_cast<std::uint32_t>(stream_),
                                    static_cast<std::uint32_t>(stream_ >> 32)};
        const auto out = Philox4x32::bijection(ctr, key_);
        buf_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
        buf_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
        ++counter_;
        pos_ = 0;
    }

    Philox4x32::Key key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 2> buf_{};
    int pos_ = 2;
};

}  // namespace cascade
