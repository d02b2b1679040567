#include <catch2/catch_amalgamated.hpp>

#include "squats/bitvec.hpp"
#include "squats/rng.hpp"

using namespace squats;

TEST_CASE("bitvec set/test/count") {
    BitVec v(130);
    REQUIRE(v.size() == 130);
    REQUIRE_FALSE(v.any());
    v.set(0);
    v.set(64);
    v.set(129);
    REQUIRE(v.test(0));
    REQUIRE(v.test(64));
    REQUIRE(v.test(129));
    REQUIRE_FALSE(v.test(1));
    REQUIRE(v.count() == 3);
    v.reset(64);
    REQUIRE(v.count() == 2);
}

TEST_CASE("bitvec OR and covers") {
    BitVec a(70), b(70);
    a.set(3);
    b.set(3);
    b.set(65);
    BitVec u = a;
    u |= b;
    REQUIRE(u.count() == 2);
    REQUIRE(covers(u, a.words()));
    REQUIRE(covers(u, b.words()));
    REQUIRE_FALSE(covers(a, b.words()));
    REQUIRE(covers(a, a.words()));
}

TEST_CASE("bitvec byte serialization uses little-endian bit order") {
    // bits 0, 3 and 10 of a 12-bit word: byte0 = 0b00001001, byte1 = 0b00000100
    BitVec v(12);
    v.set(0);
    v.set(3);
    v.set(10);
    const auto bytes = v.to_bytes();
    REQUIRE(bytes.size() == 2);
    REQUIRE(bytes[0] == 0x09);
    REQUIRE(bytes[1] == 0x04);
    REQUIRE(BitVec::from_bytes(bytes, 12) == v);
}

TEST_CASE("bitvec round trip on random contents") {
    Rng rng(7);
    for (int len : {1, 8, 63, 64, 65, 200, 1024}) {
        BitVec v(static_cast<size_t>(len));
        for (int i = 0; i < len; ++i)
            if (rng.bernoulli(0.3)) v.set(static_cast<size_t>(i));
        REQUIRE(BitVec::from_bytes(v.to_bytes(), v.size()) == v);
    }
}

TEST_CASE("count_and / count_andnot") {
    BitVec a(100), b(100);
    a.set(1);
    a.set(50);
    a.set(99);
    b.set(50);
    b.set(2);
    REQUIRE(count_and(a.words(), b.words()) == 1);
    REQUIRE(count_andnot(a.words(), b.words()) == 2);
    REQUIRE(count_andnot(b.words(), a.words()) == 1);
}
