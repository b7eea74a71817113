#include <doctest.h>

#include <random>

#include "fusion/word.hpp"
#include "oracles.hpp"

using namespace fusion;

TEST_CASE("msbIndex examples") {
    CHECK(msbIndex(136) == 7);
    CHECK(msbIndex(1) == 0);
    CHECK(msbIndex(~Word{0}) == 63);
    CHECK_THROWS_AS((void)msbIndex(0), DomainError);
}

TEST_CASE("msbIndex brackets x and agrees with a bit scan") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100000; ++i) {
        Word x = rng() >> (rng() % 64);
        if (x == 0) x = 1;
        const auto m = msbIndex(x);
        REQUIRE(m == oracle::msb(x));
        REQUIRE((x >> m) == 1);
    }
    for (unsigned b = 0; b < 64; ++b) CHECK(msbIndex(Word{1} << b) == b);
}

TEST_CASE("deltaBit examples") {
    CHECK(deltaBit(0b11101001, 0b11111001) == 4);
    CHECK(deltaBit(0, 1) == 0);
    CHECK(deltaBit(0b01100111, 0b11100001) == 7);
    CHECK_THROWS_AS((void)deltaBit(42, 42), DomainError);
}

TEST_CASE("deltaBit splits agreement from disagreement") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 100000; ++i) {
        const Word a = rng();
        const Word b = (i % 3 == 0) ? a ^ (Word{1} << (rng() % 64)) : rng();
        if (a == b) continue;
        const auto d = deltaBit(a, b);
        REQUIRE(d == oracle::delta(a, b));
        REQUIRE(bitAt(a, d) != bitAt(b, d));
        REQUIRE((a & andPrefixMask(d)) == (b & andPrefixMask(d)));
        REQUIRE(deltaBit(b, a) == d);
    }
}

TEST_CASE("deltaBit over all 8-bit pairs") {
    for (Word a = 0; a < 256; ++a)
        for (Word b = 0; b < 256; ++b)
            if (a != b) REQUIRE(deltaBit(a, b) == oracle::delta(a, b));
}

TEST_CASE("suffix and prefix masks") {
    CHECK(orSuffixMask(3) == 0b1111);
    CHECK(orSuffixMask(0) == 1);
    CHECK(orSuffixMask(7) == 255);
    CHECK(orSuffixMask(63) == ~Word{0});
    CHECK_THROWS_AS((void)orSuffixMask(64), DomainError);

    CHECK(andPrefixMask(2, 8) == 0b11111000);
    CHECK(andPrefixMask(63) == 0);
    CHECK(andPrefixMask(3, 8) == 0b11110000);
    CHECK_THROWS_AS((void)andPrefixMask(8, 8), DomainError);
}

TEST_CASE("masks partition the word") {
    for (unsigned b = 0; b < 64; ++b) {
        const Word lo = orSuffixMask(b);
        const Word hi = andPrefixMask(b);
        REQUIRE((lo ^ hi) == ~Word{0});
        REQUIRE((lo & hi) == 0);
        REQUIRE(static_cast<unsigned>(std::popcount(lo)) == b + 1);
    }
}

TEST_CASE("replicateField examples") {
    CHECK(replicateField(0b101, 4, 4) == 21845);
    CHECK(replicateField(0, 4, 4) == 0);
    CHECK(replicateField(0b11, 3, 3) == 0b011011011);
    CHECK(replicateField(0b11, 3, 3) == 219);
    CHECK(replicateField(0b011, 3, 2) == 27);
    CHECK_THROWS_AS((void)replicateField(1, 9, 8), ConfigError);
    CHECK_THROWS_AS((void)replicateField(0b1000, 4, 4), ConfigError);
    CHECK_THROWS_AS((void)replicationConstant(0, 4), ConfigError);
}

TEST_CASE("replicateField places the field in every block") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20000; ++i) {
        const unsigned bw = 2 + static_cast<unsigned>(rng() % 15);
        const unsigned count = 1 + static_cast<unsigned>(rng() % (64 / bw));
        const Word field = rng() & orSuffixMask(bw - 2);
        const Word r = replicateField(field, bw, count);
        for (unsigned j = 0; j < count; ++j) REQUIRE(((r >> (j * bw)) & orSuffixMask(bw - 1)) == field);
        if (bw * count < 64) REQUIRE((r >> (bw * count)) == 0);
        REQUIRE((r & flagMask(bw, count)) == 0);
    }
}

TEST_CASE("packedFlags marks blocks where the query does not exceed the node") {
    const unsigned bw = 5, count = 4;
    std::mt19937_64 rng(4);
    for (int i = 0; i < 20000; ++i) {
        Word node = 0;
        Word fields[count];
        for (unsigned j = 0; j < count; ++j) {
            fields[j] = rng() % 16;
            node |= ((Word{1} << (bw - 1)) | fields[j]) << (j * bw);
        }
        const Word q = rng() % 16;
        const Word f = packedFlags(node, replicateField(q, bw, count), flagMask(bw, count));
        for (unsigned j = 0; j < count; ++j) REQUIRE(bitAt(f, j * bw + bw - 1) == (q <= fields[j]));
    }
}
