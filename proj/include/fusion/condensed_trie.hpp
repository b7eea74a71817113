#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "fusion/word.hpp"

namespace fusion {

/// Binary trie with unary paths removed.  Internal nodes keep only the bit
/// on which their two subtrees diverge; leaves keep a key and its 1-based
/// position in the sorted key list.
///
/// This is the reference semantics for FusionNode: it is immutable, simple,
/// and O(|keys|) to modify.
class CondensedTrie {
public:
    using NodeId = std::size_t;

    struct Internal {
        BitIndex bit;
        NodeId left;
        NodeId right;
    };
    struct Leaf {
        Key key;
        std::size_t rank;
    };
    using Node = std::variant<Internal, Leaf>;

    /// Details of the two-search rank computation, exposed for tests.
    struct RankTrace {
        Key firstLeaf = 0;
        bool exact = false;
        BitIndex divergence = 0;
        bool divergenceBitSet = false;
        Key secondQuery = 0;
        Key secondLeaf = 0;
        std::size_t rank = 0;
    };

    /// Builds from strictly ascending keys.  Throws DomainError on empty or
    /// non-ascending input.
    static CondensedTrie build(std::span<const Key> keys);

    /// Leaf reached by following x's bits at the branch positions.
    [[nodiscard]] Key trsSearch(Key x) const;

    /// Number of stored keys <= x.
    [[nodiscard]] std::size_t rankOf(Key x) const { return rankTrace(x).rank; }
    [[nodiscard]] RankTrace rankTrace(Key x) const;

    /// Returns a trie over keys + {x}.  Throws DomainError if x is present.
    [[nodiscard]] CondensedTrie insert(Key x) const;

    [[nodiscard]] std::span<const Key> keys() const { return keys_; }
    /// Distinct branch bits, ascending.
    [[nodiscard]] std::span<const BitIndex> interestingBits() const { return interesting_; }

    [[nodiscard]] NodeId root() const { return root_; }
    [[nodiscard]] const Node& node(NodeId id) const { return nodes_[id]; }
    [[nodiscard]] std::size_t nodeCount() const { return nodes_.size(); }
    [[nodiscard]] std::size_t internalCount() const;

    /// Branch bits met on the way from the root to trsSearch(x), in order.
    [[nodiscard]] std::vector<BitIndex> searchPath(Key x) const;

    /// Structural equality: same shape, branch bits, keys and ranks.
    friend bool operator==(const CondensedTrie& a, const CondensedTrie& b);

private:
    CondensedTrie() = default;

    NodeId buildRange(std::size_t lo, std::size_t hi);
    NodeId leafFor(Key x) const;
    void refresh();

    std::vector<Node> nodes_;
    std::vector<Key> keys_;
    std::vector<BitIndex> interesting_;
    NodeId root_ = 0;
};

}  // namespace fusion
