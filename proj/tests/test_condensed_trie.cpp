#include <doctest.h>

#include <random>
#include <vector>

#include "fusion/condensed_trie.hpp"
#include "oracles.hpp"

using namespace fusion;

namespace {

const std::vector<Key> kFour = {0b11011111, 0b11100000, 0b11100001, 0b11111110};
const std::vector<Key> kFourAlt = {0b11011111, 0b11100100, 0b11100101, 0b11111110};

const CondensedTrie::Internal& internalAt(const CondensedTrie& t, CondensedTrie::NodeId id) {
    return std::get<CondensedTrie::Internal>(t.node(id));
}

}  // namespace

TEST_CASE("four-key trie shape") {
    const auto t = CondensedTrie::build(kFour);
    CHECK(std::vector<BitIndex>(t.interestingBits().begin(), t.interestingBits().end()) ==
          std::vector<BitIndex>{0, 4, 5});
    CHECK(t.internalCount() == 3);
    const auto& root = internalAt(t, t.root());
    CHECK(root.bit == 5);
    CHECK(std::get<CondensedTrie::Leaf>(t.node(root.left)).key == 0b11011111);
    const auto& right = internalAt(t, root.right);
    CHECK(right.bit == 4);
    CHECK(internalAt(t, right.left).bit == 0);
    CHECK(std::get<CondensedTrie::Leaf>(t.node(right.right)).key == 0b11111110);
}

TEST_CASE("singleton trie") {
    const std::vector<Key> one = {99};
    const auto t = CondensedTrie::build(one);
    CHECK(t.interestingBits().empty());
    CHECK(t.internalCount() == 0);
    CHECK(t.trsSearch(0) == 99);
    CHECK(t.rankOf(98) == 0);
    CHECK(t.rankOf(99) == 1);
    CHECK(t.rankOf(~Key{0}) == 1);
}

TEST_CASE("build rejects bad input") {
    const std::vector<Key> empty;
    const std::vector<Key> dup = {1, 2, 2};
    const std::vector<Key> down = {3, 2};
    CHECK_THROWS_AS(CondensedTrie::build(empty), DomainError);
    CHECK_THROWS_AS(CondensedTrie::build(dup), DomainError);
    CHECK_THROWS_AS(CondensedTrie::build(down), DomainError);
}

TEST_CASE("blind search examples") {
    const auto t = CondensedTrie::build(kFour);
    CHECK(t.trsSearch(0b11100111) == 0b11100001);
    for (Key k : kFour) CHECK(t.trsSearch(k) == k);
    CHECK(t.searchPath(0b11100111) == std::vector<BitIndex>{5, 4, 0});
}

TEST_CASE("rank: predecessor side, divergence bit set") {
    const auto t = CondensedTrie::build(kFour);
    const auto r = t.rankTrace(0b11100111);
    CHECK(r.firstLeaf == 0b11100001);
    CHECK(r.divergence == 2);
    CHECK(r.divergenceBitSet);
    CHECK(r.secondQuery == 0b11100111);
    CHECK(r.secondLeaf == 0b11100001);
    CHECK(r.rank == 3);
}

TEST_CASE("rank: divergence below the branch node") {
    const auto t = CondensedTrie::build(kFour);
    const auto r = t.rankTrace(0b11101000);
    CHECK(r.firstLeaf == 0b11100000);
    CHECK(r.divergence == 3);
    CHECK(r.divergenceBitSet);
    CHECK(r.secondQuery == 0b11101111);
    CHECK(r.secondLeaf == 0b11100001);
    CHECK(r.rank == 3);
}

TEST_CASE("rank: divergence above the root") {
    const auto t = CondensedTrie::build(kFour);
    const auto r = t.rankTrace(0b01100111);
    CHECK(r.firstLeaf == 0b11100001);
    CHECK(r.divergence == 7);
    CHECK_FALSE(r.divergenceBitSet);
    CHECK(r.secondQuery == 0);
    CHECK(r.secondLeaf == 0b11011111);
    CHECK(r.rank == 0);
}

TEST_CASE("rank: successor side, divergence bit clear") {
    const auto t = CondensedTrie::build(kFourAlt);
    const auto r = t.rankTrace(0b11100001);
    CHECK(r.divergence == 2);
    CHECK_FALSE(r.divergenceBitSet);
    CHECK(r.secondQuery == 0b11100000);
    CHECK(r.secondLeaf == 0b11100100);
    CHECK(r.rank == 1);
}

TEST_CASE("rank at the extremes and on members") {
    const auto t = CondensedTrie::build(kFour);
    CHECK(t.rankOf(0) == 0);
    CHECK(t.rankOf(~Key{0}) == 4);
    for (std::size_t i = 0; i < kFour.size(); ++i) CHECK(t.rankOf(kFour[i]) == i + 1);
    CHECK(t.rankOf(0b11100000) == 2);
}

TEST_CASE("insert creates the divergence node") {
    const auto t = CondensedTrie::build(kFour);
    const Key x = 0b11100111;
    const auto u = t.insert(x);
    CHECK(u.internalCount() == 4);
    bool found = false;
    for (CondensedTrie::NodeId id = 0; id < u.nodeCount(); ++id) {
        const auto* in = std::get_if<CondensedTrie::Internal>(&u.node(id));
        if (in == nullptr || in->bit != 2) continue;
        found = true;
        const auto* right = std::get_if<CondensedTrie::Leaf>(&u.node(in->right));
        REQUIRE(right != nullptr);
        CHECK(right->key == x);
        CHECK(internalAt(u, in->left).bit == 0);
    }
    CHECK(found);
    std::vector<Key> all = kFour;
    all.push_back(x);
    std::sort(all.begin(), all.end());
    CHECK(u == CondensedTrie::build(all));
    CHECK(t == CondensedTrie::build(kFour));
}

TEST_CASE("insert into singleton and duplicate insert") {
    const std::vector<Key> one = {0b1000};
    const auto t = CondensedTrie::build(one);
    const auto u = t.insert(0b0001);
    CHECK(internalAt(u, u.root()).bit == 3);
    CHECK(u.rankOf(0b0001) == 1);
    CHECK_THROWS_AS((void)t.insert(0b1000), DomainError);
}

TEST_CASE("random inserts reproduce build") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const auto keys = oracle::randomKeys(rng, 2 + rng() % 30, trial % 2 ? ~Key{0} : 0xfff);
        std::vector<Key> shuffled = keys;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const std::vector<Key> first = {shuffled.front()};
        auto t = CondensedTrie::build(first);
        for (std::size_t i = 1; i < shuffled.size(); ++i) t = t.insert(shuffled[i]);
        REQUIRE(t == CondensedTrie::build(keys));
    }
}

TEST_CASE("structure matches pairwise oracles") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 500; ++trial) {
        const auto keys = oracle::randomKeys(rng, 1 + rng() % 32, trial % 2 ? ~Key{0} : 0xffff);
        const auto t = CondensedTrie::build(keys);
        REQUIRE(t.internalCount() == keys.size() - 1);
        const auto bits = oracle::branchBits(keys);
        REQUIRE(std::vector<BitIndex>(t.interestingBits().begin(), t.interestingBits().end()) == bits);
        REQUIRE(bits.size() <= keys.size() - 1);
        for (int q = 0; q < 20; ++q) {
            const Key x = rng() & (trial % 2 ? ~Key{0} : 0xffff);
            const Key leaf = t.trsSearch(x);
            REQUIRE(leaf == oracle::trieWalk(keys, x));
            for (BitIndex b : t.searchPath(x)) REQUIRE(bitAt(x, b) == bitAt(leaf, b));
        }
    }
}

TEST_CASE("rank agrees with counting on random tries") {
    std::mt19937_64 rng(13);
    int trials = 0;
    while (trials < 100000) {
        const Key mask = (trials / 1000) % 2 ? ~Key{0} : 0x3ff;
        const auto keys = oracle::randomKeys(rng, 1 + rng() % 16, mask);
        const auto t = CondensedTrie::build(keys);
        for (int q = 0; q < 100; ++q, ++trials) {
            const Key x = q % 4 == 0 ? keys[rng() % keys.size()] + (rng() % 3) - 1 : rng() & mask;
            const auto r = t.rankTrace(x);
            REQUIRE(r.rank == oracle::rank(keys, x));
            if (r.exact) continue;
            // The second search lands on x's neighbour among the keys.
            if (r.divergenceBitSet)
                REQUIRE(r.secondLeaf == *oracle::predecessor(keys, x));
            else
                REQUIRE(r.secondLeaf == *oracle::successor(keys, x));
        }
    }
}

TEST_CASE("rank over every 4-subset of a 16-key universe") {
    for (Key a = 0; a < 16; ++a)
        for (Key b = a + 1; b < 16; ++b)
            for (Key c = b + 1; c < 16; ++c)
                for (Key d = c + 1; d < 16; ++d) {
                    const std::vector<Key> keys = {a, b, c, d};
                    const auto t = CondensedTrie::build(keys);
                    for (Key x = 0; x < 16; ++x) REQUIRE(t.rankOf(x) == oracle::rank(keys, x));
                }
}
