// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <catch_amalgamated.hpp>

#include "txoracle/word.hpp"

using namespace txoracle;

TEST_CASE("word renders as 66 lowercase hex characters and parses back") {
    std::mt19937_64 rng{42};
    for (int i = 0; i < 500; ++i) {
        Word w;
        for (auto& b : w.bytes) b = static_cast<uint8_t>(rng());
        auto text = w.hex();
        REQUIRE(text.size() == 66);
        REQUIRE(text.starts_with("0x"));
        for (char c : text.substr(2)) REQUIRE(((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')));
        REQUIRE(Word::from_hex(text) == w);
        REQUIRE(Word::from_uint(w.to_uint()) == w);
    }
}

TEST_CASE("word from short hex is left padded") {
    auto w = Word::from_hex("0x64");
    REQUIRE(w.to_uint() == 100);
    REQUIRE(w.short_hex() == "0x64");
    REQUIRE(Word{}.is_zero());
}

TEST_CASE("word rejects bad hex and oversized integers") {
    REQUIRE_THROWS_AS(Word::from_hex("0xzz"), Error);
    REQUIRE_THROWS_AS(Word::from_hex("0x" + std::string(66, 'f')), Error);
    REQUIRE_THROWS_AS(Word::from_uint(two_pow_256()), Error);
    REQUIRE_THROWS_AS(Word::from_uint(BigInt{-1}), Error);
}

TEST_CASE("addresses keep the low 20 bytes") {
    auto a = parse_address("0x00000000000000000000000000000000000000ab");
    REQUIRE(a.fits_address());
    REQUIRE(address_hex(a) == "0x00000000000000000000000000000000000000ab");
    REQUIRE_FALSE(Word::from_hex("0x" + std::string(64, 'f')).fits_address());
}

TEST_CASE("integer and decimal parsing is exact") {
    REQUIRE(parse_integer("-12") == -12);
    REQUIRE(parse_integer("0x10") == 16);
    REQUIRE(parse_integer("115792089237316195423570985008687907853269984665640564039457584007913129639935") ==
            two_pow_256() - 1);
    REQUIRE(parse_decimal("0.98") == Rational(49, 50));
    REQUIRE(ratio(BigInt{3}, BigInt{-6}) == Rational(-1, 2));
    REQUIRE_THROWS_AS(parse_integer("12a"), Error);
}
