#pragma once
// Slow, obviously-correct reference implementations used only by tests.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace oracle {

using U64 = std::uint64_t;

inline unsigned msb(U64 x) {
    unsigned m = 0;
    for (unsigned i = 0; i < 64; ++i)
        if ((x >> i) & 1) m = i;
    return m;
}

inline unsigned delta(U64 a, U64 b) {
    for (int i = 63; i >= 0; --i)
        if (((a >> i) & 1) != ((b >> i) & 1)) return static_cast<unsigned>(i);
    return 64;
}

// Keys <= x, by counting.
inline std::size_t rank(std::span<const U64> keys, U64 x) {
    std::size_t r = 0;
    for (U64 k : keys) r += k <= x ? 1 : 0;
    return r;
}

// Distinct bits at which some pair of keys first differs.
inline std::vector<unsigned> branchBits(std::span<const U64> keys) {
    std::set<unsigned> bits;
    for (std::size_t i = 0; i < keys.size(); ++i)
        for (std::size_t j = i + 1; j < keys.size(); ++j) bits.insert(delta(keys[i], keys[j]));
    return {bits.begin(), bits.end()};
}

// Descends the full (uncompressed) binary trie over `keys`, from bit 63
// down, following x's bit while the subtree is non-empty and branching only
// where both children exist.  Matches a condensed-trie blind search.
inline U64 trieWalk(std::span<const U64> keys, U64 x) {
    std::vector<U64> live(keys.begin(), keys.end());
    for (int b = 63; b >= 0 && live.size() > 1; --b) {
        std::vector<U64> zero, one;
        for (U64 k : live) ((k >> b) & 1 ? one : zero).push_back(k);
        if (zero.empty() || one.empty()) continue;
        live = ((x >> b) & 1) ? one : zero;
    }
    return live.front();
}

// Bits of x at `positions` (ascending), packed with positions[0] lowest.
inline U64 gather(U64 x, std::span<const unsigned> positions) {
    U64 s = 0;
    for (std::size_t i = 0; i < positions.size(); ++i) s |= ((x >> positions[i]) & 1) << i;
    return s;
}

inline std::optional<U64> predecessor(std::span<const U64> sorted, U64 x) {
    auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
    if (it == sorted.begin()) return std::nullopt;
    return *(it - 1);
}

inline std::optional<U64> successor(std::span<const U64> sorted, U64 x) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
    if (it == sorted.end()) return std::nullopt;
    return *it;
}

// ceil(log_base(n)) in integers.
inline unsigned ceilLog(U64 n, U64 base) {
    unsigned h = 0;
    for (U64 p = 1; p < n; p *= base) ++h;
    return h;
}

// Random strictly ascending key set of the given size.
template <class Rng>
std::vector<U64> randomKeys(Rng& rng, std::size_t count, U64 mask = ~U64{0}) {
    std::set<U64> s;
    while (s.size() < count) s.insert(rng() & mask);
    return {s.begin(), s.end()};
}

}  // namespace oracle
