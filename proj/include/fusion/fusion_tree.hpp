#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fusion/counters.hpp"
#include "fusion/fusion_node.hpp"
#include "fusion/word.hpp"

namespace fusion {

/// How the tree degree is chosen.
struct CapacityPolicy {
    enum class Kind { theoretical, fixed };
    Kind kind = Kind::fixed;
    unsigned degree = 8;

    static constexpr CapacityPolicy theoretical() { return {Kind::theoretical, 0}; }
    static constexpr CapacityPolicy fixed(unsigned c) { return {Kind::fixed, c}; }
};

/// Largest degree whose node sketches fit one word: floor(sqrt(w)).
inline constexpr unsigned kMaxDegree = kMaxNodeCapacity;
/// Smallest degree a B-tree can keep balanced with median splits.
inline constexpr unsigned kMinTreeDegree = 3;

/// Degree for n keys: max(2, floor(lg(n)^(1/5))) under the theoretical
/// policy, or the fixed value; both clamped to [2, floor(sqrt(w))].
unsigned degreeFor(std::size_t n, CapacityPolicy policy);

/// B-tree of degree `capacity` (at most capacity-1 keys per node) whose
/// nodes are FusionNodes.  Equal keys are stored once with a multiplicity.
///
/// Not thread-safe for writers: queries may run concurrently with each
/// other, inserts need exclusive access.
class FusionTree {
public:
    /// Degree is clamped to [kMinTreeDegree, kMaxDegree].
    explicit FusionTree(unsigned capacity = kMaxDegree, SketchMode mode = SketchMode::exact);
    static FusionTree forSize(std::size_t expectedSize, CapacityPolicy policy);

    FusionTree(FusionTree&&) noexcept;
    FusionTree& operator=(FusionTree&&) noexcept;
    ~FusionTree();

    void insert(Key x);
    void insert(Key x, Counters& counters);

    /// Stored keys (with multiplicity) <= x.
    [[nodiscard]] std::size_t rank(Key x) const;
    [[nodiscard]] std::size_t rank(Key x, Counters& counters) const;
    [[nodiscard]] bool contains(Key x) const;
    /// Largest stored key <= x.
    [[nodiscard]] std::optional<Key> predecessor(Key x) const;
    /// Smallest stored key >= x.
    [[nodiscard]] std::optional<Key> successor(Key x) const;
    /// k-th smallest stored key, 1-based, counting multiplicity.
    [[nodiscard]] std::optional<Key> select(std::size_t k) const;

    [[nodiscard]] std::vector<Key> inorder() const;

    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] std::size_t distinctSize() const { return distinct_; }
    [[nodiscard]] bool empty() const { return size() == 0; }
    [[nodiscard]] unsigned capacity() const { return capacity_; }
    [[nodiscard]] std::size_t height() const;
    [[nodiscard]] std::size_t splitCount() const { return splits_; }

    /// Checks equal leaf depth, occupancy, key order, cached counts and node
    /// sketches; throws std::logic_error describing the first violation.
    void audit() const;

private:
    struct Node;
    struct Promotion;

    void insertImpl(Key x, Counters* counters);
    std::optional<Promotion> insertInto(Node& node, Key x, Counters* counters);
    std::optional<Promotion> addKey(Node& node, std::size_t at, Key key, std::size_t count,
                                    std::unique_ptr<Node> right);
    std::size_t rankImpl(Key x, Counters* counters) const;

    unsigned capacity_;
    SketchMode mode_;
    std::unique_ptr<Node> root_;
    std::size_t distinct_ = 0;
    std::size_t splits_ = 0;
};

/// Sorts by inserting every key into a fusion tree and reading it back in order.
std::vector<Key> sortAll(std::span<const Key> input, CapacityPolicy policy = CapacityPolicy::fixed(kMaxDegree));
std::vector<Key> sortAll(std::span<const Key> input, CapacityPolicy policy, Counters& counters);

/// Order-preserving map from signed words to keys (flips the sign bit).
constexpr Key fromSigned(std::int64_t x) { return static_cast<Key>(x) ^ (Key{1} << (kWordBits - 1)); }
constexpr std::int64_t toSigned(Key k) { return static_cast<std::int64_t>(k ^ (Key{1} << (kWordBits - 1))); }

}  // namespace fusion
