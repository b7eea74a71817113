#include "fusion/btree.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "split_rule.hpp"

namespace fusion {

struct BTree::Node {
    std::vector<Key> keys;
    std::vector<std::size_t> count;
    std::vector<std::unique_ptr<Node>> children;
    std::size_t total = 0;

    [[nodiscard]] bool leaf() const { return children.empty(); }

    void refresh() {
        total = 0;
        for (std::size_t c : count) total += c;
        for (const auto& child : children) total += child->total;
    }
};

struct BTree::Promotion {
    Key key;
    std::size_t count;
    std::unique_ptr<Node> right;
};

BTree::BTree(unsigned degree) : degree_(std::clamp(degree, kMinDegree, kMaxDegree)) {}
BTree::BTree(BTree&&) noexcept = default;
BTree& BTree::operator=(BTree&&) noexcept = default;
BTree::~BTree() = default;

std::size_t BTree::size() const { return root_ ? root_->total : 0; }

std::size_t BTree::height() const {
    std::size_t h = 0;
    for (const Node* n = root_.get(); n != nullptr; n = n->leaf() ? nullptr : n->children.front().get()) ++h;
    return h;
}

BTree::Probe BTree::probe(const Node& node, Key x, Counters* counters) const {
    if (counters != nullptr) ++counters->nodeVisits;
    std::size_t i = 0;
    const std::size_t t = node.keys.size();
    for (; i < t; ++i) {
        if (counters != nullptr) {
            ++counters->keyComparisons;
            ++counters->wordOps;
        }
        const auto order = node.keys[i] <=> x;
        if (order == 0) return {i + 1, true};
        if (order > 0) break;
    }
    return {i, false};
}

void BTree::insert(Key x) { insertImpl(x, nullptr); }
void BTree::insert(Key x, Counters& counters) { insertImpl(x, &counters); }

void BTree::insertImpl(Key x, Counters* counters) {
    if (!root_) {
        root_ = std::make_unique<Node>();
        root_->keys = {x};
        root_->count = {1};
        root_->refresh();
        return;
    }
    auto promoted = insertInto(*root_, x, counters);
    if (!promoted) return;
    auto root = std::make_unique<Node>();
    root->keys = {promoted->key};
    root->count = {promoted->count};
    root->children.push_back(std::move(root_));
    root->children.push_back(std::move(promoted->right));
    root->refresh();
    root_ = std::move(root);
}

std::optional<BTree::Promotion> BTree::insertInto(Node& node, Key x, Counters* counters) {
    const Probe at = probe(node, x, counters);
    if (at.found) {
        ++node.count[at.rank - 1];
        ++node.total;
        return std::nullopt;
    }

    Key key = x;
    std::size_t count = 1;
    std::unique_ptr<Node> right;
    if (!node.leaf()) {
        auto promoted = insertInto(*node.children[at.rank], x, counters);
        if (!promoted) {
            ++node.total;
            return std::nullopt;
        }
        key = promoted->key;
        count = promoted->count;
        right = std::move(promoted->right);
    }

    const auto pos = static_cast<std::ptrdiff_t>(at.rank);
    node.keys.insert(node.keys.begin() + pos, key);
    node.count.insert(node.count.begin() + pos, count);
    if (right) node.children.insert(node.children.begin() + pos + 1, std::move(right));
    if (node.keys.size() < degree_) {
        node.refresh();
        return std::nullopt;
    }

    // Full at `degree` keys: split around the median, which moves up.
    const std::size_t mid = detail::splitPoint(degree_, at.rank);
    const auto m = static_cast<std::ptrdiff_t>(mid);
    auto sibling = std::make_unique<Node>();
    sibling->keys.assign(node.keys.begin() + m + 1, node.keys.end());
    sibling->count.assign(node.count.begin() + m + 1, node.count.end());
    if (!node.leaf()) {
        sibling->children.assign(std::make_move_iterator(node.children.begin() + m + 1),
                                 std::make_move_iterator(node.children.end()));
        node.children.erase(node.children.begin() + m + 1, node.children.end());
    }
    Promotion up{node.keys[mid], node.count[mid], nullptr};
    node.keys.resize(mid);
    node.count.resize(mid);
    node.refresh();
    sibling->refresh();
    up.right = std::move(sibling);
    ++splits_;
    return up;
}

bool BTree::search(Key x) const { return searchImpl(x, nullptr); }
bool BTree::search(Key x, Counters& counters) const { return searchImpl(x, &counters); }

bool BTree::searchImpl(Key x, Counters* counters) const {
    for (const Node* n = root_.get(); n != nullptr;) {
        const Probe at = probe(*n, x, counters);
        if (at.found) return true;
        n = n->leaf() ? nullptr : n->children[at.rank].get();
    }
    return false;
}

std::size_t BTree::rank(Key x) const { return rankImpl(x, nullptr); }
std::size_t BTree::rank(Key x, Counters& counters) const { return rankImpl(x, &counters); }

std::size_t BTree::rankImpl(Key x, Counters* counters) const {
    std::size_t acc = 0;
    for (const Node* n = root_.get(); n != nullptr;) {
        const Probe at = probe(*n, x, counters);
        for (std::size_t i = 0; i < at.rank; ++i) acc += n->count[i] + (n->leaf() ? 0 : n->children[i]->total);
        if (at.found || n->leaf()) break;
        n = n->children[at.rank].get();
    }
    return acc;
}

std::vector<Key> BTree::inorder() const {
    std::vector<Key> out;
    out.reserve(size());
    auto walk = [&](auto&& self, const Node& n) -> void {
        for (std::size_t i = 0; i < n.keys.size(); ++i) {
            if (!n.leaf()) self(self, *n.children[i]);
            out.insert(out.end(), n.count[i], n.keys[i]);
        }
        if (!n.leaf()) self(self, *n.children.back());
    };
    if (root_) walk(walk, *root_);
    return out;
}

std::vector<Key> BTree::rootKeys() const { return root_ ? root_->keys : std::vector<Key>{}; }

std::vector<std::vector<Key>> BTree::childKeys() const {
    std::vector<std::vector<Key>> out;
    if (root_)
        for (const auto& c : root_->children) out.push_back(c->keys);
    return out;
}

void BTree::audit() const {
    if (!root_) return;
    const std::size_t minKeys = (degree_ + 1) / 2 - 1;
    std::optional<std::size_t> leafDepth;
    auto fail = [](const std::string& what) { throw std::logic_error("btree audit: " + what); };
    auto check = [&](auto&& self, const Node& n, std::size_t depth, std::optional<Key> lo,
                     std::optional<Key> hi) -> std::size_t {
        const std::size_t t = n.keys.size();
        if (t == 0 || t > degree_ - 1) fail("node holds " + std::to_string(t) + " keys");
        if (&n != root_.get() && t < minKeys) fail("underfull node");
        if (n.count.size() != t) fail("multiplicity count mismatch");
        std::size_t items = 0;
        for (std::size_t i = 0; i < t; ++i) {
            if (i > 0 && n.keys[i - 1] >= n.keys[i]) fail("keys out of order");
            if ((lo && n.keys[i] <= *lo) || (hi && n.keys[i] >= *hi)) fail("key outside its parent's interval");
            if (n.count[i] == 0) fail("zero multiplicity");
            items += n.count[i];
        }
        if (n.leaf()) {
            if (!leafDepth) leafDepth = depth;
            if (*leafDepth != depth) fail("leaves at different depths");
        } else {
            if (n.children.size() != t + 1) fail("child count does not match key count");
            for (std::size_t i = 0; i <= t; ++i)
                items += self(self, *n.children[i], depth + 1, i == 0 ? lo : std::optional<Key>(n.keys[i - 1]),
                              i == t ? hi : std::optional<Key>(n.keys[i]));
        }
        if (items != n.total) fail("stale cached subtree total");
        return items;
    };
    check(check, *root_, 0, std::nullopt, std::nullopt);
}

std::vector<Key> btreeSortAll(std::span<const Key> input, unsigned degree) {
    BTree tree(degree);
    for (Key x : input) tree.insert(x);
    return tree.inorder();
}

std::vector<Key> btreeSortAll(std::span<const Key> input, unsigned degree, Counters& counters) {
    BTree tree(degree);
    for (Key x : input) tree.insert(x, counters);
    return tree.inorder();
}

}  // namespace fusion
