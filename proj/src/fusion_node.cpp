#include "fusion/fusion_node.hpp"

#include <algorithm>
#include <bit>
#include <bitset>

namespace fusion {

namespace {

constexpr std::string_view kNoMultiplier = "multiplier search failed: no collision-free shift set fits the packing";
constexpr std::string_view kSearchBudget = "multiplier search exhausted its step budget";

// Steps allowed for one multiplier search before falling back to exact mode.
constexpr unsigned long kSearchBudgetSteps = 2'000'000;

template <class W>
constexpr unsigned msbOf(W x) {
    if constexpr (sizeof(W) > sizeof(Word)) {
        const auto hi = static_cast<Word>(x >> kWordBits);
        return hi != 0 ? kWordBits + msbIndex(hi) : msbIndex(static_cast<Word>(x));
    } else {
        return msbIndex(x);
    }
}

// Packed comparison of one query sketch against `count` blocks of `block` bits.
template <class W>
FusionNode::Comparison packedComparison(W packed, W flags, W replicator, Word sketch, std::size_t count,
                                        unsigned block) {
    const W query = static_cast<W>(sketch) * replicator;
    const W difference = packed - query;
    const W survivors = difference & flags;
    FusionNode::Comparison c;
    c.query = static_cast<Word>(query);
    c.difference = static_cast<Word>(difference);
    c.flags = static_cast<Word>(survivors);
    // Surviving flags are a suffix of the blocks; the leftmost one marks the
    // first stored sketch >= the query.
    c.below = survivors == 0 ? count : count - 1 - msbOf(survivors) / block;
    return c;
}

}  // namespace

struct FusionNode::ExactPacking {
    const FusionNode& node;

    Word sketch(Key x, std::uint64_t& ops) const {
        ops += 3 * node.interestingCount_;
        return node.sketchOf(x);
    }
    Comparison compare(Word sketch, std::uint64_t& ops) const {
        ops += 7;  // multiply, subtract, mask, zero test, msb, divide, subtract
        return packedComparison<Word>(node.packed_, node.flags_, node.replicator_, sketch, node.size_,
                                      node.capacity_);
    }
    Word lowBits(unsigned count, std::uint64_t& ops) const {
        ops += 1;
        return count == 0 ? 0 : orSuffixMask(count - 1);
    }
    Word stored(std::size_t i) const { return node.sketches_[i]; }
};

struct FusionNode::ApproxPacking {
    const FusionNode& node;
    const Approximate& a;

    Word sketch(Key x, std::uint64_t& ops) const {
        ops += 4;  // mask, shift, multiply, mask
        return node.sketchViaMultiplication(x);
    }
    Comparison compare(Word sketch, std::uint64_t& ops) const {
        ops += 14;  // the exact-mode sequence on a double word
        return packedComparison<Wide>(a.packed, a.flags, a.replicator, sketch, node.size_, a.block);
    }
    Word lowBits(unsigned count, std::uint64_t& ops) const {
        ops += 1;
        return a.lowTargets[count];
    }
    Word stored(std::size_t i) const { return a.sketches[i]; }
};

FusionNode FusionNode::build(std::span<const Key> keys, unsigned capacity, SketchMode mode) {
    if (capacity == 0 || capacity * capacity > kWordBits)
        throw ConfigError("node capacity " + std::to_string(capacity) + " does not satisfy capacity^2 <= " +
                          std::to_string(kWordBits));
    if (keys.empty() || keys.size() > capacity)
        throw ConfigError("node holds between 1 and " + std::to_string(capacity) + " keys, got " +
                          std::to_string(keys.size()));
    for (std::size_t i = 1; i < keys.size(); ++i)
        if (keys[i - 1] >= keys[i]) throw DomainError("fusion node keys must be strictly ascending");

    FusionNode n;
    n.size_ = keys.size();
    n.capacity_ = capacity;
    n.requested_ = mode;
    std::copy(keys.begin(), keys.end(), n.keys_.begin());

    for (std::size_t i = 1; i < keys.size(); ++i) n.interestingMask_ |= Word{1} << deltaBit(keys[i - 1], keys[i]);
    for (Word m = n.interestingMask_; m != 0; m &= m - 1) {
        const auto pos = static_cast<BitIndex>(std::countr_zero(m));
        n.gatherShift_[n.interestingCount_] = static_cast<unsigned char>(pos - n.interestingCount_);
        n.interesting_[n.interestingCount_++] = pos;
    }

    const unsigned r = capacity;
    const auto t = static_cast<unsigned>(n.size_);
    const Word flag = Word{1} << (r - 1);
    for (unsigned i = 0; i < t; ++i) {
        n.sketches_[i] = n.sketchOf(keys[i]);
        n.packed_ |= (flag | n.sketches_[i]) << ((t - 1 - i) * r);
    }
    n.flags_ = fusion::flagMask(r, t);
    n.replicator_ = replicationConstant(r, t);

    if (mode == SketchMode::multiply && !n.tryMultiplier() && n.diagnostic_.empty()) n.diagnostic_ = kNoMultiplier;
    return n;
}

Word FusionNode::sketchOf(Key x) const {
    Word sk = 0;
    for (unsigned i = 0; i < interestingCount_; ++i) sk |= (x >> gatherShift_[i]) & (Word{1} << i);
    return sk;
}

FusionNode::Comparison FusionNode::compare(Word sketch) const {
    if (sketch >> (capacity_ - 1) != 0) throw DomainError("query sketch is wider than the node's sketch field");
    return packedComparison<Word>(packed_, flags_, replicator_, sketch, size_, capacity_);
}

template <class Packing>
FusionNode::Located FusionNode::rankWith(const Packing& packing, Key x, Counters* counters, RankTrace* trace) const {
    std::uint64_t ops = 0;
    std::uint64_t comparisons = 0;

    const Word sketch = packing.sketch(x, ops);
    const Comparison first = packing.compare(sketch, ops);

    // Of the two sketch neighbours, the one sharing the longer prefix with x
    // is the leaf a condensed-trie search for x would reach.
    const std::size_t p = first.below;
    std::size_t leaf = 0;
    if (p == 0) {
        leaf = 0;
    } else if (p == size_) {
        leaf = size_ - 1;
    } else {
        ops += 3;
        leaf = (x ^ keys_[p]) < (x ^ keys_[p - 1]) ? p : p - 1;
    }

    const Word diff = x ^ keys_[leaf];
    ops += 1;
    comparisons += 1;

    Located out;
    BitIndex divergence = 0;
    bool high = false;
    Word secondSketch = 0;
    Comparison second;
    if (diff == 0) {
        out = {leaf + 1, true};
    } else {
        divergence = msbIndex(diff);
        high = x > keys_[leaf];  // x and the leaf first differ at `divergence`
        ops += 2;
        comparisons += 1;

        // Interesting bits at or below the divergence occupy the lowest sketch
        // positions, so the masked second query's sketch follows from the first.
        const auto lowCount = static_cast<unsigned>(std::popcount(interestingMask_ & orSuffixMask(divergence)));
        ops += 3;
        const Word low = packing.lowBits(lowCount, ops);
        if (high) {
            // x | 1..1 lands after the largest key of the sibling subtree,
            // which is x's predecessor.
            secondSketch = sketch | low;
            second = packing.compare(secondSketch, ops);
            const std::size_t q = second.below;
            ops += 1;
            out.rank = q + ((q < size_ && packing.stored(q) == secondSketch) ? 1 : 0);
        } else {
            // x & 1..10..0 lands before the sibling subtree's smallest key, the
            // successor; keys <= x are exactly those before that slot.
            secondSketch = sketch & ~low;
            second = packing.compare(secondSketch, ops);
            out.rank = second.below;
        }
    }

    if (counters != nullptr) {
        counters->wordOps += ops;
        counters->keyComparisons += comparisons;
    }
    if (trace != nullptr) {
        trace->sketch = sketch;
        trace->first = first;
        trace->leafIndex = leaf;
        trace->exact = out.found;
        trace->divergence = divergence;
        trace->divergenceBitSet = high;
        if (!out.found)
            trace->secondQuery = high ? (x | orSuffixMask(divergence)) : (x & andPrefixMask(divergence));
        trace->secondSketch = secondSketch;
        trace->second = second;
        trace->rank = out.rank;
    }
    return out;
}

FusionNode::Located FusionNode::locate(Key x) const {
    if (approx_) return rankWith(ApproxPacking{*this, *approx_}, x, nullptr, nullptr);
    return rankWith(ExactPacking{*this}, x, nullptr, nullptr);
}

FusionNode::Located FusionNode::locate(Key x, Counters& counters) const {
    if (approx_) return rankWith(ApproxPacking{*this, *approx_}, x, &counters, nullptr);
    return rankWith(ExactPacking{*this}, x, &counters, nullptr);
}

FusionNode::RankTrace FusionNode::trace(Key x) const {
    RankTrace tr;
    (void)rankWith(ExactPacking{*this}, x, nullptr, &tr);
    return tr;
}

std::optional<FusionNode> FusionNode::rebuildWith(Key x) const {
    const auto first = keys_.begin();
    const auto last = first + static_cast<std::ptrdiff_t>(size_);
    const auto pos = std::lower_bound(first, last, x);
    if (pos != last && *pos == x) throw DomainError("key already present in fusion node");
    if (size_ == capacity_) return std::nullopt;

    std::array<Key, kMaxNodeCapacity> merged{};
    auto out = std::copy(first, pos, merged.begin());
    *out++ = x;
    std::copy(pos, last, out);
    return build({merged.data(), size_ + 1}, capacity_, requested_);
}

Word FusionNode::sketchViaMultiplication(Key x) const {
    if (!approx_) throw DomainError("node has no multiplication sketch");
    const Approximate& a = *approx_;
    return (((x & a.interestingMask) >> a.lowBit) * a.multiplier) & a.targetMask;
}

std::size_t FusionNode::packedCompareMultiplied(Word sketch) const {
    if (!approx_) throw DomainError("node has no multiplication sketch");
    const Approximate& a = *approx_;
    if (a.width < kWordBits && sketch >> a.width != 0)
        throw DomainError("query sketch is wider than the node's sketch field");
    return packedComparison<Wide>(a.packed, a.flags, a.replicator, sketch, size_, a.block).below;
}

bool FusionNode::tryMultiplier() {
    const unsigned k = interestingCount_;
    const auto t = static_cast<unsigned>(size_);
    constexpr unsigned kWideBits = 2 * kWordBits;

    Approximate a;
    a.interestingMask = interestingMask_;
    a.lowBit = k == 0 ? 0 : interesting_[0];

    // Bit i of the masked, shifted key sits at offset[i]; multiplying by
    // sum 2^shift[i] copies it to offset[i] + shift[i].  When all such sums
    // are distinct no carries occur, so target[i] = offset[i] + shift[i]
    // holds exactly bit i.  Targets must ascend to preserve order.
    std::array<unsigned, kMaxNodeCapacity> offset{};
    for (unsigned i = 0; i < k; ++i) offset[i] = interesting_[i] - a.lowBit;

    std::array<unsigned, kMaxNodeCapacity> shift{};
    std::array<unsigned, kMaxNodeCapacity> target{};
    bool found = k <= 1;
    if (!found) {
        const unsigned maxWidth = std::min(kWideBits / t - 1, kWordBits);
        std::bitset<2 * kWordBits> sums;
        unsigned long steps = 0;
        unsigned lastTarget = 0;

        auto place = [&](auto&& self, unsigned i) -> bool {
            if (i == k) return true;
            const unsigned lo = target[i - 1] + 1 > offset[i] ? target[i - 1] + 1 - offset[i] : 0;
            for (unsigned s = lo; offset[i] + s <= lastTarget; ++s) {
                if (++steps > kSearchBudgetSteps) return false;
                bool clear = true;
                for (unsigned j = 0; j < k && clear; ++j) clear = !sums[offset[j] + s];
                if (!clear) continue;
                for (unsigned j = 0; j < k; ++j) sums.set(offset[j] + s);
                shift[i] = s;
                target[i] = offset[i] + s;
                if (self(self, i + 1)) return true;
                for (unsigned j = 0; j < k; ++j) sums.reset(offset[j] + s);
            }
            return false;
        };

        // Smallest span first: the sketches get narrower blocks.
        for (lastTarget = offset[k - 1]; lastTarget + 1 <= maxWidth && !found; ++lastTarget) {
            sums.reset();
            for (unsigned j = 0; j < k; ++j) sums.set(offset[j]);
            shift[0] = 0;
            target[0] = 0;
            found = place(place, 1);
            if (steps > kSearchBudgetSteps) {
                diagnostic_ = kSearchBudget;
                return false;
            }
        }
        if (!found) return false;
    }

    a.width = k == 0 ? 0 : target[k - 1] + 1;
    a.block = a.width + 1;
    for (unsigned i = 0; i < k; ++i) {
        a.multiplier |= Word{1} << shift[i];
        a.targetMask |= Word{1} << target[i];
        a.lowTargets[i + 1] = a.lowTargets[i] | (Word{1} << target[i]);
    }
    if (k == 0) a.multiplier = 1;

    approx_ = std::make_shared<const Approximate>(a);  // sketchViaMultiplication needs it below
    for (unsigned i = 0; i < t; ++i) {
        a.sketches[i] = sketchViaMultiplication(keys_[i]);
        const unsigned at = (t - 1 - i) * a.block;
        a.packed |= ((Wide{1} << a.width) | a.sketches[i]) << at;
        a.replicator |= Wide{1} << at;
        a.flags |= Wide{1} << (at + a.width);
    }
    approx_ = std::make_shared<const Approximate>(a);
    return true;
}

}  // namespace fusion
