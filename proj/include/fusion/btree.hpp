#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fusion/counters.hpp"
#include "fusion/word.hpp"

namespace fusion {

/// Classic in-memory B-tree of degree B: every node holds at most B-1 keys
/// and is searched by a linear scan, one key comparison per probe.  Equal
/// keys share one slot with a multiplicity, as in FusionTree, so the two
/// trees take the same shape on the same insert history.
class BTree {
public:
    static constexpr unsigned kMinDegree = 3;
    static constexpr unsigned kMaxDegree = 64;

    /// Degree is clamped to [kMinDegree, kMaxDegree].
    explicit BTree(unsigned degree = 8);
    BTree(BTree&&) noexcept;
    BTree& operator=(BTree&&) noexcept;
    ~BTree();

    void insert(Key x);
    void insert(Key x, Counters& counters);

    [[nodiscard]] bool search(Key x) const;
    [[nodiscard]] bool search(Key x, Counters& counters) const;
    [[nodiscard]] std::size_t rank(Key x) const;
    [[nodiscard]] std::size_t rank(Key x, Counters& counters) const;
    [[nodiscard]] std::vector<Key> inorder() const;

    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] unsigned degree() const { return degree_; }
    [[nodiscard]] std::size_t height() const;
    [[nodiscard]] std::size_t splitCount() const { return splits_; }

    /// Keys of the root and of its children, for shape inspection.
    [[nodiscard]] std::vector<Key> rootKeys() const;
    [[nodiscard]] std::vector<std::vector<Key>> childKeys() const;

    /// Same contract as FusionTree::audit.
    void audit() const;

private:
    struct Node;
    struct Promotion;
    struct Probe {
        std::size_t rank;
        bool found;
    };

    Probe probe(const Node& node, Key x, Counters* counters) const;
    void insertImpl(Key x, Counters* counters);
    std::optional<Promotion> insertInto(Node& node, Key x, Counters* counters);
    std::size_t rankImpl(Key x, Counters* counters) const;
    bool searchImpl(Key x, Counters* counters) const;

    unsigned degree_;
    std::unique_ptr<Node> root_;
    std::size_t splits_ = 0;
};

/// Sorts by repeated insertion into a B-tree of the given degree.
std::vector<Key> btreeSortAll(std::span<const Key> input, unsigned degree);
std::vector<Key> btreeSortAll(std::span<const Key> input, unsigned degree, Counters& counters);

}  // namespace fusion
