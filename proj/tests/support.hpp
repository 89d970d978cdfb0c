#pragma once

#include "splitwalk/targets/mixed.hpp"

namespace test_support {

/// U(0,1) with weight 0.7 plus an atom of mass 0.3 at 0.5.
inline splitwalk::MixedDistribution mixture() {
    return splitwalk::MixedDistribution(splitwalk::UniformBase{0.0, 1.0}, 0.7, {{0.5, 0.3}});
}

inline splitwalk::MixedDistribution uniform01() {
    return splitwalk::MixedDistribution(splitwalk::UniformBase{0.0, 1.0}, 1.0, {});
}

}  // namespace test_support
