#pragma once

/// Counter-based random streams.
///
/// Every stream is a Philox4x32-10 generator (Salmon et al., Random123) keyed
/// by a 64-bit seed. The 128-bit counter is split into a 64-bit stream id and
/// a 64-bit block index, so streams that differ only in their id never share
/// a counter value and are independent for all practical purposes.

#include <array>
#include <cstdint>

namespace splitwalk {

/// One Philox4x32-10 block: 128-bit counter, 64-bit key.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

/// SplitMix64 finalizer, used to turn structured (seed, id) pairs into keys.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : seed_(seed), stream_(stream_id) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_; }

    std::uint64_t next_u64() noexcept {
        if (pos_ == 2) refill();
        return buf_[pos_++];
    }

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Independent child stream. The child key mixes (seed, stream id) so the
    /// child family does not overlap the parent family.
    RngStream substream(std::uint64_t child_id) const noexcept {
        return RngStream(mix64(seed_ ^ mix64(stream_ + 0x5851f42d4c957f2dULL)), child_id);
    }

private:
    void refill() noexcept;

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buf_{};
    int pos_ = 2;
};

}  // namespace splitwalk
