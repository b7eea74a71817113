#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string_view>

#include "fusion/counters.hpp"
#include "fusion/word.hpp"

namespace fusion {

/// Largest node capacity whose sketches still pack into one word.
inline constexpr unsigned kMaxNodeCapacity = 8;
static_assert(kMaxNodeCapacity * kMaxNodeCapacity <= kWordBits);

enum class SketchMode {
    exact,     ///< bit-by-bit gather of the interesting bits
    multiply,  ///< one multiplication; sketches carry extra zero bits
};

/// A B-tree node augmented so that a query is ranked against every key in a
/// constant number of word operations.
///
/// Each key is reduced to its sketch: its bits at the node's interesting
/// positions (the branch bits of the keys' condensed trie).  The sketches,
/// each prefixed by a 1 flag, are packed left to right into one word; one
/// subtraction of the replicated query sketch then compares it with all of
/// them at once.
class FusionNode {
public:
    /// Intermediate words of one packed comparison.
    struct Comparison {
        Word query = 0;       ///< query sketch replicated into every block
        Word difference = 0;  ///< packed sketches minus `query`
        Word flags = 0;       ///< `difference` restricted to the flag bits
        std::size_t below = 0;  ///< stored sketches strictly below the query
    };

    /// Every step of a rank computation, for inspection in tests.
    struct RankTrace {
        Word sketch = 0;
        Comparison first;
        std::size_t leafIndex = 0;  ///< key sharing the longest prefix with x
        bool exact = false;
        BitIndex divergence = 0;
        bool divergenceBitSet = false;
        Key secondQuery = 0;
        Word secondSketch = 0;
        Comparison second;
        std::size_t rank = 0;
    };

    struct Located {
        std::size_t rank = 0;  ///< keys <= x
        bool found = false;    ///< x is one of the keys
    };

    /// Builds a node over strictly ascending keys.  Requires
    /// 1 <= keys.size() <= capacity and capacity^2 <= word width.  In
    /// multiply mode a failed multiplier search falls back to exact mode;
    /// see diagnostic().
    static FusionNode build(std::span<const Key> keys, unsigned capacity, SketchMode mode = SketchMode::exact);

    [[nodiscard]] std::size_t size() const { return size_; }
    [[nodiscard]] unsigned capacity() const { return capacity_; }
    [[nodiscard]] unsigned blockWidth() const { return capacity_; }
    [[nodiscard]] std::span<const Key> keys() const { return {keys_.data(), size_}; }
    [[nodiscard]] std::span<const BitIndex> interestingBits() const { return {interesting_.data(), interestingCount_}; }
    [[nodiscard]] std::span<const Word> sketches() const { return {sketches_.data(), size_}; }
    [[nodiscard]] Word packedSketches() const { return packed_; }
    [[nodiscard]] Word flagMask() const { return flags_; }

    [[nodiscard]] SketchMode mode() const { return approx_ ? SketchMode::multiply : SketchMode::exact; }
    [[nodiscard]] SketchMode requestedMode() const { return requested_; }
    /// Empty unless a multiply-mode build fell back to exact sketches.
    [[nodiscard]] std::string_view diagnostic() const { return diagnostic_; }

    /// Bits of x at the interesting positions, most significant leftmost.
    [[nodiscard]] Word sketchOf(Key x) const;

    /// Number of stored sketches strictly less than `sketch`.
    [[nodiscard]] std::size_t packedCompare(Word sketch) const { return compare(sketch).below; }
    [[nodiscard]] Comparison compare(Word sketch) const;

    /// Number of keys <= x.
    [[nodiscard]] std::size_t rank(Key x) const { return locate(x).rank; }
    [[nodiscard]] std::size_t rank(Key x, Counters& counters) const { return locate(x, counters).rank; }
    [[nodiscard]] Located locate(Key x) const;
    [[nodiscard]] Located locate(Key x, Counters& counters) const;
    /// Exact-mode rank with every intermediate value recorded.
    [[nodiscard]] RankTrace trace(Key x) const;

    /// The node with x added, or nullopt when the node is full and must be
    /// split by the caller.  Throws DomainError if x is already stored.
    [[nodiscard]] std::optional<FusionNode> rebuildWith(Key x) const;

    /// Multiplication-based sketch.  Order-isomorphic to the exact sketches
    /// but with padding zeros between the extracted bits.  Throws
    /// DomainError unless mode() is multiply.
    [[nodiscard]] Word sketchViaMultiplication(Key x) const;
    /// Number of stored multiplication sketches strictly less than `sketch`,
    /// via the double-word packed comparison.  Requires multiply mode.
    [[nodiscard]] std::size_t packedCompareMultiplied(Word sketch) const;
    /// Multiplier used by sketchViaMultiplication (0 in exact mode).
    [[nodiscard]] Word multiplier() const { return approx_ ? approx_->multiplier : 0; }
    /// Width in bits of the multiplication sketches (0 in exact mode).
    [[nodiscard]] unsigned approximateWidth() const { return approx_ ? approx_->width : 0; }

private:
    __extension__ typedef unsigned __int128 Wide;

    struct Approximate {
        Word interestingMask = 0;
        BitIndex lowBit = 0;
        Word multiplier = 0;
        Word targetMask = 0;
        unsigned width = 0;
        unsigned block = 0;
        Wide packed = 0;
        Wide flags = 0;
        Wide replicator = 0;
        std::array<Word, kMaxNodeCapacity> sketches{};
        std::array<Word, kMaxNodeCapacity> lowTargets{};  ///< lowest c target bits
    };

    struct ExactPacking;
    struct ApproxPacking;

    FusionNode() = default;
    bool tryMultiplier();

    template <class Packing>
    Located rankWith(const Packing& packing, Key x, Counters* counters, RankTrace* trace) const;

    std::array<Key, kMaxNodeCapacity> keys_{};
    std::array<Word, kMaxNodeCapacity> sketches_{};
    std::array<BitIndex, kMaxNodeCapacity> interesting_{};
    std::array<unsigned char, kMaxNodeCapacity> gatherShift_{};
    std::size_t size_ = 0;
    unsigned interestingCount_ = 0;
    unsigned capacity_ = 0;
    Word interestingMask_ = 0;
    Word packed_ = 0;
    Word flags_ = 0;
    Word replicator_ = 0;
    SketchMode requested_ = SketchMode::exact;
    std::shared_ptr<const Approximate> approx_;  // immutable, so shared between copies
    std::string_view diagnostic_;
};

}  // namespace fusion
