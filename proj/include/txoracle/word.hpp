// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstring>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "error.hpp"

namespace txoracle {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Bytes = std::vector<uint8_t>;

namespace detail {

    inline int hex_digit(char c) noexcept {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    }

    inline constexpr char kHexChars[] = "0123456789abcdef";

    inline std::string_view strip_0x(std::string_view s) {
        if (s.size() >= 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) return s.substr(2);
        throw Error(ErrorCode::kMalformedValue, "missing 0x prefix: " + std::string{s});
    }

}  // namespace detail

inline Bytes bytes_from_hex(std::string_view hex) {
    auto digits = detail::strip_0x(hex);
    if (digits.size() % 2 != 0) throw Error(ErrorCode::kMalformedValue, "odd-length hex string");
    Bytes out(digits.size() / 2);
    for (size_t i = 0; i < out.size(); ++i) {
        int hi = detail::hex_digit(digits[2 * i]);
        int lo = detail::hex_digit(digits[2 * i + 1]);
        if (hi < 0 || lo < 0) throw Error(ErrorCode::kMalformedValue, "bad hex digit in " + std::string{hex});
        out[i] = static_cast<uint8_t>(hi * 16 + lo);
    }
    return out;
}

inline std::string bytes_to_hex(const uint8_t* data, size_t size) {
    std::string out = "0x";
    out.reserve(2 + size * 2);
    for (size_t i = 0; i < size; ++i) {
        out.push_back(detail::kHexChars[data[i] >> 4]);
        out.push_back(detail::kHexChars[data[i] & 0xf]);
    }
    return out;
}

inline std::string bytes_to_hex(const Bytes& b) { return bytes_to_hex(b.data(), b.size()); }

/// n/d with the sign carried by the numerator.
inline Rational ratio(const BigInt& n, const BigInt& d) { return d < 0 ? Rational{BigInt{-n}, BigInt{-d}} : Rational{n, d}; }

inline const BigInt& two_pow_256() {
    static const BigInt value = BigInt{1} << 256;
    return value;
}

/// 256-bit machine word, stored big-endian.
///
/// Addresses are Words whose high 12 bytes are zero; they render in the
/// usual 20-byte form through address_hex().
struct Word {
    std::array<uint8_t, 32> bytes{};

    static Word from_hex(std::string_view hex) {
        auto digits = detail::strip_0x(hex);
        if (digits.empty() || digits.size() > 64)
            throw Error(ErrorCode::kMalformedValue, "word hex must have 1..64 digits: " + std::string{hex});
        Word w;
        size_t nibble = 64 - digits.size();
        for (char c : digits) {
            int d = detail::hex_digit(c);
            if (d < 0) throw Error(ErrorCode::kMalformedValue, "bad hex digit in " + std::string{hex});
            auto& b = w.bytes[nibble / 2];
            b = static_cast<uint8_t>(nibble % 2 == 0 ? (d << 4) | (b & 0x0f) : (b & 0xf0) | d);
            ++nibble;
        }
        return w;
    }

    static Word from_uint(const BigInt& v) {
        if (v < 0 || v >= two_pow_256()) throw Error(ErrorCode::kMalformedValue, "value does not fit in 256 bits");
        Word w;
        Bytes tmp;
        boost::multiprecision::export_bits(v, std::back_inserter(tmp), 8);
        if (v == 0) return w;
        std::memcpy(w.bytes.data() + 32 - tmp.size(), tmp.data(), tmp.size());
        return w;
    }

    static Word from_u64(uint64_t v) noexcept {
        Word w;
        for (int i = 0; i < 8; ++i) w.bytes[31 - i] = static_cast<uint8_t>(v >> (8 * i));
        return w;
    }

    static Word from_span(const uint8_t* data) noexcept {
        Word w;
        std::memcpy(w.bytes.data(), data, 32);
        return w;
    }

    [[nodiscard]] BigInt to_uint() const {
        BigInt v;
        boost::multiprecision::import_bits(v, bytes.begin(), bytes.end(), 8);
        return v;
    }

    /// Canonical rendering: 0x followed by exactly 64 lowercase hex digits.
    [[nodiscard]] std::string hex() const { return bytes_to_hex(bytes.data(), bytes.size()); }

    /// Shortest rendering (0x0 for zero), used for mapping keys in property text.
    [[nodiscard]] std::string short_hex() const {
        std::string full = hex();
        size_t first = full.find_first_not_of('0', 2);
        if (first == std::string::npos) return "0x0";
        return "0x" + full.substr(first);
    }

    [[nodiscard]] bool is_zero() const noexcept {
        for (auto b : bytes)
            if (b) return false;
        return true;
    }

    [[nodiscard]] bool fits_address() const noexcept {
        for (int i = 0; i < 12; ++i)
            if (bytes[i]) return false;
        return true;
    }

    auto operator<=>(const Word&) const = default;
};

inline std::string address_hex(const Word& w) { return bytes_to_hex(w.bytes.data() + 12, 20); }

inline Word parse_address(std::string_view hex) {
    auto digits = detail::strip_0x(hex);
    if (digits.size() != 40) throw Error(ErrorCode::kMalformedValue, "address must have 40 hex digits: " + std::string{hex});
    return Word::from_hex(hex);
}

/// Accepts either a 20-byte address or a full 32-byte word.
inline Word parse_word_or_address(std::string_view hex) {
    auto digits = detail::strip_0x(hex);
    if (digits.size() == 40) return parse_address(hex);
    return Word::from_hex(hex);
}

/// Pseudo-token address used to key Ether balances in token[...] variables.
inline const Word& ether_marker() {
    static const Word w = Word::from_hex("0xeeeeeeeeeeeeeeeeeeeeeeeeeeeeeeeeeeeeeeee");
    return w;
}

inline std::string to_decimal(const BigInt& v) { return v.str(); }

inline BigInt parse_integer(std::string_view text) {
    if (text.empty()) throw Error(ErrorCode::kMalformedValue, "empty integer");
    bool neg = text.front() == '-';
    auto body = neg ? text.substr(1) : text;
    if (body.empty()) throw Error(ErrorCode::kMalformedValue, "empty integer");
    BigInt v;
    if (body.size() > 2 && body[0] == '0' && (body[1] == 'x' || body[1] == 'X')) {
        for (char c : body.substr(2)) {
            int d = detail::hex_digit(c);
            if (d < 0) throw Error(ErrorCode::kMalformedValue, "bad hex integer " + std::string{text});
            v = v * 16 + d;
        }
    } else {
        for (char c : body) {
            if (c < '0' || c > '9') throw Error(ErrorCode::kMalformedValue, "bad integer " + std::string{text});
            v = v * 10 + (c - '0');
        }
    }
    return neg ? BigInt{-v} : v;
}

/// Exact decimal parse ("0.98" -> 49/50); rejects exponents.
inline Rational parse_decimal(std::string_view text) {
    auto dot = text.find('.');
    if (dot == std::string_view::npos) return Rational{parse_integer(text)};
    std::string digits{text.substr(0, dot)};
    auto frac = text.substr(dot + 1);
    if (frac.empty() || frac.find_first_not_of("0123456789") != std::string_view::npos)
        throw Error(ErrorCode::kMalformedValue, "bad decimal " + std::string{text});
    bool neg = !digits.empty() && digits[0] == '-';
    if (digits.empty() || digits == "-") digits += "0";
    BigInt whole = parse_integer(digits);
    BigInt scale = boost::multiprecision::pow(BigInt{10}, static_cast<unsigned>(frac.size()));
    BigInt f = parse_integer(std::string{frac});
    BigInt num = (neg ? -whole : whole) * scale + f;
    return Rational{neg ? BigInt{-num} : num, scale};
}

}  // namespace txoracle

template <>
struct std::hash<txoracle::Word> {
    size_t operator()(const txoracle::Word& w) const noexcept {
        size_t h = 0;
        for (int i = 0; i < 32; i += 8) {
            uint64_t lane;
            std::memcpy(&lane, w.bytes.data() + i, 8);
            h ^= std::hash<uint64_t>{}(lane) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};
