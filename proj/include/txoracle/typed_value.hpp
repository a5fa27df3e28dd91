// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "word.hpp"

namespace txoracle {

enum class ValueTag { kAddress, kUnsigned, kSigned, kBool, kFixedBytes, kArray, kStruct };

inline std::string_view to_string(ValueTag tag) noexcept {
    switch (tag) {
        case ValueTag::kAddress: return "Address";
        case ValueTag::kUnsigned: return "Unsigned";
        case ValueTag::kSigned: return "Signed";
        case ValueTag::kBool: return "Bool";
        case ValueTag::kFixedBytes: return "FixedBytes";
        case ValueTag::kArray: return "Array";
        case ValueTag::kStruct: return "Struct";
    }
    return "?";
}

inline ValueTag value_tag_from_string(std::string_view s) {
    for (auto t : {ValueTag::kAddress, ValueTag::kUnsigned, ValueTag::kSigned, ValueTag::kBool, ValueTag::kFixedBytes,
                   ValueTag::kArray, ValueTag::kStruct})
        if (to_string(t) == s) return t;
    throw Error(ErrorCode::kMalformedArtifact, "unknown value tag " + std::string{s});
}

/// A decoded value together with the solidity type it was decoded as.
///
/// Scalars keep their integer payload in `number`; FixedBytes keep raw bytes
/// (dynamic `bytes`/`string` are carried here too). Arrays and structs nest.
struct TypedValue {
    ValueTag tag{ValueTag::kUnsigned};
    std::string type;
    BigInt number;
    Bytes bytes;
    std::vector<TypedValue> items;
    std::vector<std::string> member_names;  // parallel to items for structs

    static TypedValue address(const Word& w) {
        return {ValueTag::kAddress, "address", w.to_uint() & ((BigInt{1} << 160) - 1), {}, {}, {}};
    }
    static TypedValue unsigned_int(BigInt v, std::string type = "uint256") {
        return {ValueTag::kUnsigned, std::move(type), std::move(v), {}, {}, {}};
    }
    static TypedValue signed_int(BigInt v, std::string type = "int256") {
        return {ValueTag::kSigned, std::move(type), std::move(v), {}, {}, {}};
    }
    static TypedValue boolean(bool b) { return {ValueTag::kBool, "bool", BigInt{b ? 1 : 0}, {}, {}, {}}; }
    static TypedValue fixed_bytes(Bytes b, std::string type) {
        return {ValueTag::kFixedBytes, std::move(type), {}, std::move(b), {}, {}};
    }

    [[nodiscard]] bool is_scalar() const noexcept { return tag != ValueTag::kArray && tag != ValueTag::kStruct; }

    /// Integer view: addresses, integers and bools map directly; bytesN map
    /// big-endian. Dynamic bytes, arrays and structs have no numeric view.
    [[nodiscard]] std::optional<BigInt> numeric() const {
        switch (tag) {
            case ValueTag::kAddress:
            case ValueTag::kUnsigned:
            case ValueTag::kSigned:
            case ValueTag::kBool: return number;
            case ValueTag::kFixedBytes: {
                if (type == "bytes" || type == "string" || bytes.size() > 32) return std::nullopt;
                BigInt v;
                for (auto b : bytes) v = (v << 8) | b;
                return v;
            }
            default: return std::nullopt;
        }
    }

    bool operator==(const TypedValue&) const = default;
};

inline nlohmann::json to_json(const TypedValue& v) {
    nlohmann::json j;
    j["tag"] = std::string{to_string(v.tag)};
    j["type"] = v.type;
    switch (v.tag) {
        case ValueTag::kAddress: j["value"] = address_hex(Word::from_uint(v.number)); break;
        case ValueTag::kUnsigned:
        case ValueTag::kSigned: j["value"] = to_decimal(v.number); break;
        case ValueTag::kBool: j["value"] = v.number != 0; break;
        case ValueTag::kFixedBytes: j["value"] = bytes_to_hex(v.bytes); break;
        case ValueTag::kArray: {
            auto items = nlohmann::json::array();
            for (const auto& item : v.items) items.push_back(to_json(item));
            j["items"] = std::move(items);
            break;
        }
        case ValueTag::kStruct: {
            auto members = nlohmann::json::array();
            for (size_t i = 0; i < v.items.size(); ++i)
                members.push_back({{"name", v.member_names[i]}, {"value", to_json(v.items[i])}});
            j["members"] = std::move(members);
            break;
        }
    }
    return j;
}

inline TypedValue typed_value_from_json(const nlohmann::json& j) {
    TypedValue v;
    v.tag = value_tag_from_string(j.at("tag").get<std::string>());
    v.type = j.at("type").get<std::string>();
    switch (v.tag) {
        case ValueTag::kAddress: v.number = parse_address(j.at("value").get<std::string>()).to_uint(); break;
        case ValueTag::kUnsigned:
        case ValueTag::kSigned: v.number = parse_integer(j.at("value").get<std::string>()); break;
        case ValueTag::kBool: v.number = j.at("value").get<bool>() ? 1 : 0; break;
        case ValueTag::kFixedBytes: v.bytes = bytes_from_hex(j.at("value").get<std::string>()); break;
        case ValueTag::kArray:
            for (const auto& item : j.at("items")) v.items.push_back(typed_value_from_json(item));
            break;
        case ValueTag::kStruct:
            for (const auto& m : j.at("members")) {
                v.member_names.push_back(m.at("name").get<std::string>());
                v.items.push_back(typed_value_from_json(m.at("value")));
            }
            break;
    }
    return v;
}

}  // namespace txoracle
