#pragma once

#include <cstddef>

namespace fusion::detail {

// A node of a degree-B tree overflows when its B-th key arrives at position
// `insertedAt`.  Returns the index (within the B keys) of the key promoted to
// the parent.  For even B this is the median of the full node before the
// insert, so both halves keep at least B/2 - 1 keys; for odd B the median of
// all B keys.
constexpr std::size_t splitPoint(unsigned degree, std::size_t insertedAt) {
    if (degree % 2 == 1) return degree / 2;
    const std::size_t median = (degree - 2) / 2;
    return insertedAt <= median ? median + 1 : median;
}

}  // namespace fusion::detail
