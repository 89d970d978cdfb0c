#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace splitwalk {

struct Run {
    double value;
    std::uint64_t length;

    friend bool operator==(const Run&, const Run&) = default;
};

/// Maximal runs of exactly equal values of a non-decreasing sequence.
/// Run values are strictly increasing and the lengths sum to the sequence size.
struct RunLengthEncoding {
    std::vector<Run> runs;

    std::uint64_t total() const noexcept {
        std::uint64_t s = 0;
        for (const Run& r : runs) s += r.length;
        return s;
    }
    friend bool operator==(const RunLengthEncoding&, const RunLengthEncoding&) = default;
};

/// Per repeated value d: number of walks whose states contain d.
using StrictCounts = std::map<double, std::uint64_t>;

/// Throws UsageError when `sorted` decreases anywhere.
RunLengthEncoding rle(std::span<const double> sorted);

/// Replaces the length of every run whose value appears in `counts`.
RunLengthEncoding with_strict_counts(const RunLengthEncoding& r, const StrictCounts& counts);

}  // namespace splitwalk
