// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>

#include "word.hpp"

namespace txoracle {

namespace detail {

    inline constexpr std::array<uint64_t, 24> kKeccakRoundConstants{
        0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL, 0x8000000080008000ULL,
        0x000000000000808bULL, 0x0000000080000001ULL, 0x8000000080008081ULL, 0x8000000000008009ULL,
        0x000000000000008aULL, 0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
        0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL, 0x8000000000008003ULL,
        0x8000000000008002ULL, 0x8000000000000080ULL, 0x000000000000800aULL, 0x800000008000000aULL,
        0x8000000080008081ULL, 0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL,
    };

    // rho offsets and pi lane order, walked along the pi permutation cycle
    inline constexpr std::array<int, 24> kKeccakRho{1,  3,  6,  10, 15, 21, 28, 36, 45, 55, 2,  14,
                                                    27, 41, 56, 8,  25, 43, 62, 18, 39, 61, 20, 44};
    inline constexpr std::array<int, 24> kKeccakPi{10, 7,  11, 17, 18, 3, 5,  16, 8,  21, 24, 4,
                                                   15, 23, 19, 13, 12, 2, 20, 14, 22, 9,  6,  1};

    constexpr uint64_t rotl64(uint64_t x, int n) noexcept { return (x << n) | (x >> (64 - n)); }

    inline void keccak_f1600(std::array<uint64_t, 25>& st) noexcept {
        for (uint64_t rc : kKeccakRoundConstants) {
            uint64_t bc[5];
            for (int i = 0; i < 5; ++i) bc[i] = st[i] ^ st[i + 5] ^ st[i + 10] ^ st[i + 15] ^ st[i + 20];
            for (int i = 0; i < 5; ++i) {
                uint64_t t = bc[(i + 4) % 5] ^ rotl64(bc[(i + 1) % 5], 1);
                for (int j = 0; j < 25; j += 5) st[j + i] ^= t;
            }
            uint64_t t = st[1];
            for (int i = 0; i < 24; ++i) {
                int j = kKeccakPi[i];
                uint64_t tmp = st[j];
                st[j] = rotl64(t, kKeccakRho[i]);
                t = tmp;
            }
            for (int j = 0; j < 25; j += 5) {
                for (int i = 0; i < 5; ++i) bc[i] = st[j + i];
                for (int i = 0; i < 5; ++i) st[j + i] ^= (~bc[(i + 1) % 5]) & bc[(i + 2) % 5];
            }
            st[0] ^= rc;
        }
    }

    inline uint64_t load_le64(const uint8_t* p) noexcept {
        uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
        return v;
    }

}  // namespace detail

/// Keccak-256 with the original 0x01 domain padding (the EVM variant, not FIPS SHA3-256).
inline Word keccak256(std::span<const uint8_t> data) noexcept {
    constexpr size_t kRate = 136;
    std::array<uint64_t, 25> st{};
    size_t off = 0;
    while (data.size() - off >= kRate) {
        for (size_t i = 0; i < kRate / 8; ++i) st[i] ^= detail::load_le64(data.data() + off + 8 * i);
        detail::keccak_f1600(st);
        off += kRate;
    }
    std::array<uint8_t, kRate> block{};
    std::memcpy(block.data(), data.data() + off, data.size() - off);
    block[data.size() - off] ^= 0x01;
    block[kRate - 1] ^= 0x80;
    for (size_t i = 0; i < kRate / 8; ++i) st[i] ^= detail::load_le64(block.data() + 8 * i);
    detail::keccak_f1600(st);

    Word out;
    for (size_t i = 0; i < 4; ++i)
        for (size_t b = 0; b < 8; ++b) out.bytes[8 * i + b] = static_cast<uint8_t>(st[i] >> (8 * b));
    return out;
}

inline Word keccak256(std::string_view text) noexcept {
    return keccak256(std::span<const uint8_t>{reinterpret_cast<const uint8_t*>(text.data()), text.size()});
}

/// Storage slot of mapping entry `key` for a mapping rooted at `base_slot`.
inline Word mapping_slot(const Word& key, const Word& base_slot) noexcept {
    std::array<uint8_t, 64> buf{};
    std::memcpy(buf.data(), key.bytes.data(), 32);
    std::memcpy(buf.data() + 32, base_slot.bytes.data(), 32);
    return keccak256(std::span<const uint8_t>{buf});
}

/// First slot of the data area of a dynamic array rooted at `base_slot`.
inline Word array_data_slot(const Word& base_slot) noexcept {
    return keccak256(std::span<const uint8_t>{base_slot.bytes});
}

/// `base + n` modulo 2^256.
inline Word slot_add(const Word& base, uint64_t n) noexcept {
    Word out = base;
    uint64_t carry = n;
    for (int i = 31; i >= 0 && carry; --i) {
        uint64_t sum = out.bytes[i] + (carry & 0xff);
        out.bytes[i] = static_cast<uint8_t>(sum);
        carry = (carry >> 8) + (sum >> 8);
    }
    return out;
}

}  // namespace txoracle
