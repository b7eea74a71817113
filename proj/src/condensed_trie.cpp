#include "fusion/condensed_trie.hpp"

#include <algorithm>
#include <functional>
#include <optional>

namespace fusion {

CondensedTrie CondensedTrie::build(std::span<const Key> keys) {
    if (keys.empty()) throw DomainError("condensed trie needs at least one key");
    for (std::size_t i = 1; i < keys.size(); ++i) {
        if (keys[i - 1] == keys[i]) throw DomainError("duplicate key in condensed trie");
        if (keys[i - 1] > keys[i]) throw DomainError("condensed trie keys must be ascending");
    }
    CondensedTrie t;
    t.keys_.assign(keys.begin(), keys.end());
    t.nodes_.reserve(2 * keys.size() - 1);
    t.root_ = t.buildRange(0, keys.size());
    t.refresh();
    return t;
}

CondensedTrie::NodeId CondensedTrie::buildRange(std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) {
        nodes_.push_back(Leaf{keys_[lo], 0});
        return nodes_.size() - 1;
    }
    // The first and last keys of a sorted range diverge at the range's top branch bit.
    const BitIndex bit = deltaBit(keys_[lo], keys_[hi - 1]);
    const auto first = keys_.begin() + static_cast<std::ptrdiff_t>(lo);
    const auto last = keys_.begin() + static_cast<std::ptrdiff_t>(hi);
    const auto split = std::partition_point(first, last, [bit](Key k) { return !bitAt(k, bit); });
    const auto mid = static_cast<std::size_t>(split - keys_.begin());
    const NodeId left = buildRange(lo, mid);
    const NodeId right = buildRange(mid, hi);
    nodes_.push_back(Internal{bit, left, right});
    return nodes_.size() - 1;
}

void CondensedTrie::refresh() {
    keys_.clear();
    interesting_.clear();
    std::function<void(NodeId)> walk = [&](NodeId id) {
        if (auto* in = std::get_if<Internal>(&nodes_[id])) {
            interesting_.push_back(in->bit);
            walk(in->left);
            walk(in->right);
        } else {
            auto& leaf = std::get<Leaf>(nodes_[id]);
            keys_.push_back(leaf.key);
            leaf.rank = keys_.size();
        }
    };
    walk(root_);
    std::sort(interesting_.begin(), interesting_.end());
    interesting_.erase(std::unique(interesting_.begin(), interesting_.end()), interesting_.end());
}

CondensedTrie::NodeId CondensedTrie::leafFor(Key x) const {
    NodeId id = root_;
    while (const auto* in = std::get_if<Internal>(&nodes_[id])) id = bitAt(x, in->bit) ? in->right : in->left;
    return id;
}

Key CondensedTrie::trsSearch(Key x) const { return std::get<Leaf>(nodes_[leafFor(x)]).key; }

std::vector<BitIndex> CondensedTrie::searchPath(Key x) const {
    std::vector<BitIndex> path;
    NodeId id = root_;
    while (const auto* in = std::get_if<Internal>(&nodes_[id])) {
        path.push_back(in->bit);
        id = bitAt(x, in->bit) ? in->right : in->left;
    }
    return path;
}

CondensedTrie::RankTrace CondensedTrie::rankTrace(Key x) const {
    RankTrace tr;
    const auto& first = std::get<Leaf>(nodes_[leafFor(x)]);
    tr.firstLeaf = first.key;
    if (first.key == x) {
        tr.exact = true;
        tr.secondLeaf = first.key;
        tr.rank = first.rank;
        return tr;
    }
    tr.divergence = deltaBit(x, first.key);
    tr.divergenceBitSet = bitAt(x, tr.divergence);
    if (tr.divergenceBitSet) {
        // Saturating the low bits steers the second search to the largest
        // key of the sibling subtree: x's predecessor.
        tr.secondQuery = x | orSuffixMask(tr.divergence);
        const auto& pred = std::get<Leaf>(nodes_[leafFor(tr.secondQuery)]);
        tr.secondLeaf = pred.key;
        tr.rank = pred.rank;
    } else {
        // Clearing them finds the smallest key of the sibling subtree: x's
        // successor, whose rank counts itself.
        tr.secondQuery = x & andPrefixMask(tr.divergence);
        const auto& succ = std::get<Leaf>(nodes_[leafFor(tr.secondQuery)]);
        tr.secondLeaf = succ.key;
        tr.rank = succ.rank - 1;
    }
    return tr;
}

CondensedTrie CondensedTrie::insert(Key x) const {
    const Key nearest = trsSearch(x);
    if (nearest == x) throw DomainError("key already present in condensed trie");
    const BitIndex bit = deltaBit(x, nearest);

    CondensedTrie t = *this;
    t.nodes_.push_back(Leaf{x, 0});
    const NodeId leaf = t.nodes_.size() - 1;

    // Descend past every branch above the new one; the new branch goes
    // directly above the first node that splits on a lower bit.
    std::optional<NodeId> parent;
    bool parentRight = false;
    NodeId cur = t.root_;
    while (const auto* in = std::get_if<Internal>(&t.nodes_[cur])) {
        if (in->bit < bit) break;
        parent = cur;
        parentRight = bitAt(x, in->bit);
        cur = parentRight ? in->right : in->left;
    }
    t.nodes_.push_back(bitAt(x, bit) ? Internal{bit, cur, leaf} : Internal{bit, leaf, cur});
    const NodeId fresh = t.nodes_.size() - 1;
    if (!parent) {
        t.root_ = fresh;
    } else {
        auto& up = std::get<Internal>(t.nodes_[*parent]);
        (parentRight ? up.right : up.left) = fresh;
    }
    t.refresh();
    return t;
}

std::size_t CondensedTrie::internalCount() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return std::holds_alternative<Internal>(n); }));
}

bool operator==(const CondensedTrie& a, const CondensedTrie& b) {
    std::function<bool(CondensedTrie::NodeId, CondensedTrie::NodeId)> same = [&](auto ia, auto ib) {
        const auto& na = a.nodes_[ia];
        const auto& nb = b.nodes_[ib];
        if (na.index() != nb.index()) return false;
        if (const auto* la = std::get_if<CondensedTrie::Leaf>(&na)) {
            const auto& lb = std::get<CondensedTrie::Leaf>(nb);
            return la->key == lb.key && la->rank == lb.rank;
        }
        const auto& xa = std::get<CondensedTrie::Internal>(na);
        const auto& xb = std::get<CondensedTrie::Internal>(nb);
        return xa.bit == xb.bit && same(xa.left, xb.left) && same(xa.right, xb.right);
    };
    return same(a.root_, b.root_);
}

}  // namespace fusion
