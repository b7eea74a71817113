#pragma once

#include <cstdint>

namespace fusion {

/// Operation counts for the word-RAM cost model.
struct Counters {
    std::uint64_t nodeVisits = 0;
    std::uint64_t wordOps = 0;
    std::uint64_t keyComparisons = 0;

    void reset() { *this = Counters{}; }

    Counters& operator+=(const Counters& o) {
        nodeVisits += o.nodeVisits;
        wordOps += o.wordOps;
        keyComparisons += o.keyComparisons;
        return *this;
    }
    friend bool operator==(const Counters&, const Counters&) = default;
};

}  // namespace fusion
