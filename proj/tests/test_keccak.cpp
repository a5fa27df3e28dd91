// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <random>

#include <catch_amalgamated.hpp>
#include <nlohmann/json.hpp>

#include "ref_keccak.hpp"
#include "txoracle/keccak.hpp"

using namespace txoracle;

namespace {

nlohmann::json vectors() {
    std::ifstream in{std::string{TXORACLE_FIXTURES} + "/keccak_vectors.json"};
    return nlohmann::json::parse(in);
}

Word ref_word(const std::vector<uint8_t>& data) {
    auto d = reftest::keccak256(data);
    return Word::from_span(d.data());
}

}  // namespace

TEST_CASE("reference keccak matches recorded vectors") {
    auto j = vectors();
    REQUIRE(j.at("keccak").size() > 10);
    for (const auto& v : j.at("keccak")) {
        Bytes input;
        if (v.contains("text")) {
            auto t = v.at("text").get<std::string>();
            input.assign(t.begin(), t.end());
        } else {
            input = bytes_from_hex(v.at("input").get<std::string>());
        }
        auto want = Word::from_hex(v.at("digest").get<std::string>());
        REQUIRE(ref_word(input) == want);
        REQUIRE(keccak256(std::span<const uint8_t>{input}) == want);
    }
}

TEST_CASE("keccak agrees with the reference across block boundaries") {
    std::mt19937_64 rng{7};
    for (size_t len : {0, 1, 55, 56, 135, 136, 137, 271, 272, 273, 1000}) {
        Bytes data(len);
        for (auto& b : data) b = static_cast<uint8_t>(rng());
        REQUIRE(keccak256(std::span<const uint8_t>{data}) == ref_word(data));
    }
}

TEST_CASE("mapping slot of zero key and zero slot") {
    REQUIRE(mapping_slot(Word{}, Word{}) == ref_word(std::vector<uint8_t>(64, 0)));
    REQUIRE(mapping_slot(Word{}, Word{}).hex() == "0xad3228b676f7d3cd4284a5443f17f1962b36e491b30a40b2405849e597ba5fb5");
}

TEST_CASE("mapping slot is deterministic and matches recorded entries") {
    auto j = vectors();
    for (const auto& v : j.at("mappingSlot")) {
        auto key = Word::from_hex(v.at("key").get<std::string>());
        auto slot = Word::from_hex(v.at("slot").get<std::string>());
        auto want = Word::from_hex(v.at("mappingSlot").get<std::string>());
        REQUIRE(mapping_slot(key, slot) == want);
        REQUIRE(mapping_slot(key, slot) == mapping_slot(key, slot));
    }
}

TEST_CASE("balances slot for a holder is keccak of padded holder and slot one") {
    auto holder = parse_address("0xabababababababababababababababababababab");
    std::vector<uint8_t> buf(64, 0);
    std::copy(holder.bytes.begin(), holder.bytes.end(), buf.begin());
    buf[63] = 1;
    REQUIRE(mapping_slot(holder, Word::from_u64(1)) == ref_word(buf));
}

TEST_CASE("array data slot and slot arithmetic") {
    auto base = Word::from_u64(2);
    REQUIRE(array_data_slot(base) == ref_word(std::vector<uint8_t>(base.bytes.begin(), base.bytes.end())));
    auto top = Word::from_uint(two_pow_256() - 1);
    REQUIRE(slot_add(top, 1) == Word{});
    REQUIRE(slot_add(base, 3).to_uint() == 5);
}
