#include "fusion/fusion_tree.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <stdexcept>
#include <string>

#include "split_rule.hpp"

namespace fusion {

unsigned degreeFor(std::size_t n, CapacityPolicy policy) {
    unsigned degree = policy.degree;
    if (policy.kind == CapacityPolicy::Kind::theoretical) {
        // floor(lg(n)^(1/5)) = largest b with b^5 <= floor(lg n), in integers.
        const unsigned lg = n == 0 ? 0 : static_cast<unsigned>(std::bit_width(n) - 1);
        unsigned b = 1;
        while ((b + 1) * (b + 1) * (b + 1) * (b + 1) * (b + 1) <= lg) ++b;
        degree = b;
    }
    return std::clamp(degree, 2u, kMaxDegree);
}

struct FusionTree::Node {
    FusionNode index;
    std::array<std::size_t, kMaxDegree> count{};       // multiplicity per key
    std::array<std::size_t, kMaxDegree + 1> prefix{};  // items before key i, children included
    std::size_t total = 0;
    std::vector<std::unique_ptr<Node>> children;       // empty for leaves

    explicit Node(FusionNode idx) : index(std::move(idx)) {}

    [[nodiscard]] bool leaf() const { return children.empty(); }
    [[nodiscard]] std::size_t keyCount() const { return index.size(); }
    [[nodiscard]] std::size_t childTotal(std::size_t i) const { return leaf() ? 0 : children[i]->total; }

    void refresh() {
        const std::size_t t = keyCount();
        prefix[0] = 0;
        for (std::size_t i = 0; i < t; ++i) prefix[i + 1] = prefix[i] + childTotal(i) + count[i];
        total = prefix[t] + childTotal(t);
    }
};

struct FusionTree::Promotion {
    Key key;
    std::size_t count;
    std::unique_ptr<Node> right;
};

FusionTree::FusionTree(unsigned capacity, SketchMode mode)
    : capacity_(std::clamp(capacity, kMinTreeDegree, kMaxDegree)), mode_(mode) {}

FusionTree FusionTree::forSize(std::size_t expectedSize, CapacityPolicy policy) {
    return FusionTree(degreeFor(expectedSize, policy));
}

FusionTree::FusionTree(FusionTree&&) noexcept = default;
FusionTree& FusionTree::operator=(FusionTree&&) noexcept = default;
FusionTree::~FusionTree() = default;

std::size_t FusionTree::size() const { return root_ ? root_->total : 0; }

std::size_t FusionTree::height() const {
    std::size_t h = 0;
    for (const Node* n = root_.get(); n != nullptr; n = n->leaf() ? nullptr : n->children.front().get()) ++h;
    return h;
}

void FusionTree::insert(Key x) { insertImpl(x, nullptr); }
void FusionTree::insert(Key x, Counters& counters) { insertImpl(x, &counters); }

void FusionTree::insertImpl(Key x, Counters* counters) {
    if (!root_) {
        const Key one[] = {x};
        root_ = std::make_unique<Node>(FusionNode::build(one, capacity_, mode_));
        root_->count[0] = 1;
        root_->refresh();
        distinct_ = 1;
        return;
    }
    auto promoted = insertInto(*root_, x, counters);
    if (!promoted) return;

    // Root split: the tree grows by one level.
    const Key one[] = {promoted->key};
    auto root = std::make_unique<Node>(FusionNode::build(one, capacity_, mode_));
    root->count[0] = promoted->count;
    root->children.push_back(std::move(root_));
    root->children.push_back(std::move(promoted->right));
    root->refresh();
    root_ = std::move(root);
}

std::optional<FusionTree::Promotion> FusionTree::insertInto(Node& node, Key x, Counters* counters) {
    FusionNode::Located at;
    if (counters != nullptr) {
        ++counters->nodeVisits;
        at = node.index.locate(x, *counters);
    } else {
        at = node.index.locate(x);
    }

    if (at.found) {
        ++node.count[at.rank - 1];
        node.refresh();
        return std::nullopt;
    }
    if (node.leaf()) {
        ++distinct_;
        return addKey(node, at.rank, x, 1, nullptr);
    }
    auto promoted = insertInto(*node.children[at.rank], x, counters);
    if (!promoted) {
        node.refresh();
        return std::nullopt;
    }
    return addKey(node, at.rank, promoted->key, promoted->count, std::move(promoted->right));
}

std::optional<FusionTree::Promotion> FusionTree::addKey(Node& node, std::size_t at, Key key, std::size_t count,
                                                        std::unique_ptr<Node> right) {
    const std::size_t t = node.keyCount();
    if (t + 1 < capacity_) {
        auto rebuilt = node.index.rebuildWith(key);
        node.index = std::move(*rebuilt);
        std::copy_backward(node.count.begin() + static_cast<std::ptrdiff_t>(at),
                           node.count.begin() + static_cast<std::ptrdiff_t>(t),
                           node.count.begin() + static_cast<std::ptrdiff_t>(t + 1));
        node.count[at] = count;
        if (right) node.children.insert(node.children.begin() + static_cast<std::ptrdiff_t>(at + 1), std::move(right));
        node.refresh();
        return std::nullopt;
    }

    // Overflow: capacity keys around the median; the median moves up.
    std::array<Key, kMaxDegree> keys{};
    std::array<std::size_t, kMaxDegree> counts{};
    const auto current = node.index.keys();
    std::copy(current.begin(), current.begin() + static_cast<std::ptrdiff_t>(at), keys.begin());
    std::copy(current.begin() + static_cast<std::ptrdiff_t>(at), current.end(),
              keys.begin() + static_cast<std::ptrdiff_t>(at + 1));
    keys[at] = key;
    std::copy(node.count.begin(), node.count.begin() + static_cast<std::ptrdiff_t>(at), counts.begin());
    std::copy(node.count.begin() + static_cast<std::ptrdiff_t>(at), node.count.begin() + static_cast<std::ptrdiff_t>(t),
              counts.begin() + static_cast<std::ptrdiff_t>(at + 1));
    counts[at] = count;
    if (right) node.children.insert(node.children.begin() + static_cast<std::ptrdiff_t>(at + 1), std::move(right));

    const std::size_t full = t + 1;
    const std::size_t mid = detail::splitPoint(capacity_, at);
    auto sibling = std::make_unique<Node>(
        FusionNode::build(std::span<const Key>(keys.data() + mid + 1, full - mid - 1), capacity_, mode_));
    std::copy(counts.begin() + static_cast<std::ptrdiff_t>(mid + 1), counts.begin() + static_cast<std::ptrdiff_t>(full),
              sibling->count.begin());
    if (!node.leaf()) {
        auto split = node.children.begin() + static_cast<std::ptrdiff_t>(mid + 1);
        sibling->children.assign(std::make_move_iterator(split), std::make_move_iterator(node.children.end()));
        node.children.erase(split, node.children.end());
    }
    node.index = FusionNode::build(std::span<const Key>(keys.data(), mid), capacity_, mode_);
    node.count.fill(0);
    std::copy(counts.begin(), counts.begin() + static_cast<std::ptrdiff_t>(mid), node.count.begin());
    node.refresh();
    sibling->refresh();
    ++splits_;
    return Promotion{keys[mid], counts[mid], std::move(sibling)};
}

std::size_t FusionTree::rank(Key x) const { return rankImpl(x, nullptr); }
std::size_t FusionTree::rank(Key x, Counters& counters) const { return rankImpl(x, &counters); }

std::size_t FusionTree::rankImpl(Key x, Counters* counters) const {
    std::size_t acc = 0;
    for (const Node* n = root_.get(); n != nullptr;) {
        FusionNode::Located at;
        if (counters != nullptr) {
            ++counters->nodeVisits;
            at = n->index.locate(x, *counters);
        } else {
            at = n->index.locate(x);
        }
        acc += n->prefix[at.rank];
        if (at.found || n->leaf()) break;
        n = n->children[at.rank].get();
    }
    return acc;
}

bool FusionTree::contains(Key x) const {
    for (const Node* n = root_.get(); n != nullptr;) {
        const auto at = n->index.locate(x);
        if (at.found) return true;
        if (n->leaf()) return false;
        n = n->children[at.rank].get();
    }
    return false;
}

std::optional<Key> FusionTree::select(std::size_t k) const {
    if (k == 0 || k > size()) return std::nullopt;
    const Node* n = root_.get();
    for (;;) {
        const std::size_t t = n->keyCount();
        std::size_t i = 0;
        for (; i < t; ++i) {
            const std::size_t throughChild = n->prefix[i] + n->childTotal(i);
            if (k <= throughChild) break;
            if (k <= n->prefix[i + 1]) return n->index.keys()[i];
        }
        k -= n->prefix[i];
        n = n->children[i].get();
    }
}

std::optional<Key> FusionTree::predecessor(Key x) const {
    const std::size_t r = rank(x);
    return r == 0 ? std::nullopt : select(r);
}

std::optional<Key> FusionTree::successor(Key x) const {
    const std::size_t below = x == 0 ? 0 : rank(x - 1);
    return below == size() ? std::nullopt : select(below + 1);
}

std::vector<Key> FusionTree::inorder() const {
    std::vector<Key> out;
    out.reserve(size());
    auto walk = [&](auto&& self, const Node& n) -> void {
        const auto keys = n.index.keys();
        for (std::size_t i = 0; i < keys.size(); ++i) {
            if (!n.leaf()) self(self, *n.children[i]);
            out.insert(out.end(), n.count[i], keys[i]);
        }
        if (!n.leaf()) self(self, *n.children.back());
    };
    if (root_) walk(walk, *root_);
    return out;
}

void FusionTree::audit() const {
    if (!root_) {
        if (distinct_ != 0) throw std::logic_error("empty tree reports distinct keys");
        return;
    }
    const std::size_t minKeys = (capacity_ + 1) / 2 - 1;
    std::optional<std::size_t> leafDepth;
    std::size_t distinct = 0;

    auto fail = [](const std::string& what) { throw std::logic_error("fusion tree audit: " + what); };
    auto check = [&](auto&& self, const Node& n, std::size_t depth, std::optional<Key> lo,
                     std::optional<Key> hi) -> void {
        const auto keys = n.index.keys();
        const std::size_t t = keys.size();
        if (t == 0 || t > capacity_ - 1) fail("node holds " + std::to_string(t) + " keys");
        if (&n != root_.get() && t < minKeys) fail("underfull node with " + std::to_string(t) + " keys");
        for (std::size_t i = 0; i < t; ++i) {
            if (i > 0 && keys[i - 1] >= keys[i]) fail("keys out of order");
            if ((lo && keys[i] <= *lo) || (hi && keys[i] >= *hi)) fail("key outside its parent's interval");
            if (n.count[i] == 0) fail("zero multiplicity");
            if (n.index.rank(keys[i]) != i + 1) fail("fusion node misranks its own key");
        }
        distinct += t;
        if (n.leaf()) {
            if (!leafDepth) leafDepth = depth;
            if (*leafDepth != depth) fail("leaves at different depths");
        } else {
            if (n.children.size() != t + 1) fail("child count does not match key count");
            for (std::size_t i = 0; i <= t; ++i)
                self(self, *n.children[i], depth + 1, i == 0 ? lo : std::optional<Key>(keys[i - 1]),
                     i == t ? hi : std::optional<Key>(keys[i]));
        }
        std::size_t items = 0;
        for (std::size_t i = 0; i < t; ++i) {
            if (n.prefix[i] != items) fail("stale cached prefix count");
            items += n.childTotal(i) + n.count[i];
        }
        if (n.prefix[t] != items || n.total != items + n.childTotal(t)) fail("stale cached subtree total");
    };
    check(check, *root_, 0, std::nullopt, std::nullopt);
    if (distinct != distinct_) fail("distinct key count mismatch");
}

std::vector<Key> sortAll(std::span<const Key> input, CapacityPolicy policy) {
    FusionTree tree = FusionTree::forSize(input.size(), policy);
    for (Key x : input) tree.insert(x);
    return tree.inorder();
}

std::vector<Key> sortAll(std::span<const Key> input, CapacityPolicy policy, Counters& counters) {
    FusionTree tree = FusionTree::forSize(input.size(), policy);
    for (Key x : input) tree.insert(x, counters);
    return tree.inorder();
}

}  // namespace fusion
