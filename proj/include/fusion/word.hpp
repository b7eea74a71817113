#pragma once

// Word-RAM primitives shared by the tries, fusion nodes and trees.
//
// Every function here runs in a constant number of word operations.  The
// word width is fixed at build time; functions that depend on it take an
// optional `width` so the small 8-bit examples can be expressed directly.

#include <bit>
#include <climits>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace fusion {

using Word = std::uint64_t;
using Key = Word;
using BitIndex = unsigned;

inline constexpr unsigned kWordBits = sizeof(Word) * CHAR_BIT;

/// Raised when an operation is applied outside its mathematical domain
/// (msb of zero, divergence of equal keys, duplicate trie keys, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Raised when a packing or capacity configuration cannot be honoured.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Position of the highest set bit, i.e. floor(lg x).
constexpr BitIndex msbIndex(Word x) {
    if (x == 0) throw DomainError("msb of zero");
    return static_cast<BitIndex>(std::bit_width(x) - 1);
}

/// Most significant bit position at which `a` and `b` differ.
constexpr BitIndex deltaBit(Word a, Word b) {
    if (a == b) throw DomainError("no divergence bit");
    return msbIndex(a ^ b);
}

constexpr bool bitAt(Word x, BitIndex b) { return ((x >> b) & 1u) != 0; }

/// 2^(b+1) - 1: ones in positions b..0.
constexpr Word orSuffixMask(BitIndex b) {
    if (b >= kWordBits) throw DomainError("bit index out of range");
    return ~Word{0} >> (kWordBits - 1 - b);
}

/// Complement of orSuffixMask(b) within `width` bits: ones strictly above b.
constexpr Word andPrefixMask(BitIndex b, unsigned width = kWordBits) {
    if (width == 0 || width > kWordBits || b >= width)
        throw DomainError("bit index out of range");
    const Word all = ~Word{0} >> (kWordBits - width);
    return all & ~orSuffixMask(b);
}

/// sum_{i<count} 2^(i*blockWidth): multiplying a field by this replicates it
/// into `count` blocks.
constexpr Word replicationConstant(unsigned blockWidth, unsigned count) {
    if (blockWidth == 0 || count == 0 ||
        static_cast<unsigned long long>(blockWidth) * count > kWordBits)
        throw ConfigError("packing overflow: " + std::to_string(count) + " blocks of " +
                          std::to_string(blockWidth) + " bits exceed the word");
    Word c = 0;
    for (unsigned i = 0; i < count; ++i) c |= Word{1} << (i * blockWidth);
    return c;
}

/// Ones at the top bit of each of `count` blocks of `blockWidth` bits.
constexpr Word flagMask(unsigned blockWidth, unsigned count) {
    return replicationConstant(blockWidth, count) << (blockWidth - 1);
}

/// `count` copies of (0 . field) in blocks of `blockWidth` bits, built with a
/// single multiplication.
constexpr Word replicateField(Word field, unsigned blockWidth, unsigned count) {
    const Word constant = replicationConstant(blockWidth, count);
    if (field >> (blockWidth - 1) != 0)
        throw ConfigError("field does not fit below the block flag bit");
    return field * constant;
}

/// Flags of (node - query) restricted to the block flag positions.  A flag
/// survives exactly where the query block is <= the node block.
constexpr Word packedFlags(Word node, Word query, Word flags) {
    return (node - query) & flags;
}

}  // namespace fusion
