// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "keccak.hpp"
#include "typed_value.hpp"

namespace txoracle {

struct TypeDesc;
using TypeDescPtr = std::shared_ptr<const TypeDesc>;

struct StructMember {
    std::string label;
    uint64_t slot{0};
    unsigned offset{0};
    TypeDescPtr type;
};

/// Storage type descriptor built from the compiler's storageLayout `types` table.
struct TypeDesc {
    enum class Kind { kValue, kDynArray, kMapping, kStruct, kOpaque };

    Kind kind{Kind::kOpaque};
    std::string label;      // solidity type name, e.g. "uint256", "address"
    unsigned width{32};     // byte width for value types
    uint64_t slots{1};      // storage slots occupied in place
    TypeDescPtr key;        // mapping key
    TypeDescPtr value;      // mapping value or array element
    std::vector<StructMember> members;
};

struct LayoutEntry {
    std::string label;
    Word slot;
    unsigned offset{0};
    TypeDescPtr type;
};

struct LayoutIndex {
    std::vector<LayoutEntry> entries;

    [[nodiscard]] const LayoutEntry* find(std::string_view label) const {
        for (const auto& e : entries)
            if (e.label == label) return &e;
        return nullptr;
    }
};

namespace detail {

    inline uint64_t layout_number(const nlohmann::json& j) {
        if (j.is_number_unsigned()) return j.get<uint64_t>();
        if (j.is_string()) {
            auto s = j.get<std::string>();
            if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
                throw Error(ErrorCode::kMalformedLayout, "bad number " + s);
            return std::stoull(s);
        }
        throw Error(ErrorCode::kMalformedLayout, "expected number");
    }

    inline std::string value_label(std::string label) {
        if (label.rfind("contract ", 0) == 0 || label == "address payable") return "address";
        if (label.rfind("enum ", 0) == 0) return "uint8";
        return label;
    }

    class TypeTableParser {
      public:
        explicit TypeTableParser(const nlohmann::json& types) : types_(types) {}

        TypeDescPtr get(const std::string& id) {
            if (auto it = cache_.find(id); it != cache_.end()) return it->second;
            if (!types_.contains(id)) throw Error(ErrorCode::kMalformedLayout, "unknown type id " + id);
            if (depth_ > 32) throw Error(ErrorCode::kMalformedLayout, "type nesting too deep at " + id);
            ++depth_;
            auto desc = build(types_.at(id));
            --depth_;
            cache_.emplace(id, desc);
            return desc;
        }

      private:
        TypeDescPtr build(const nlohmann::json& t) {
            auto d = std::make_shared<TypeDesc>();
            auto encoding = t.at("encoding").get<std::string>();
            uint64_t bytes = layout_number(t.at("numberOfBytes"));
            d->label = t.at("label").get<std::string>();
            d->slots = std::max<uint64_t>(1, (bytes + 31) / 32);
            if (encoding == "mapping") {
                d->kind = TypeDesc::Kind::kMapping;
                d->key = get(t.at("key").get<std::string>());
                d->value = get(t.at("value").get<std::string>());
            } else if (encoding == "dynamic_array") {
                d->kind = TypeDesc::Kind::kDynArray;
                d->value = get(t.at("base").get<std::string>());
            } else if (encoding == "bytes") {
                d->kind = TypeDesc::Kind::kOpaque;
            } else if (encoding == "inplace") {
                if (t.contains("members")) {
                    d->kind = TypeDesc::Kind::kStruct;
                    for (const auto& m : t.at("members")) {
                        StructMember member;
                        member.label = m.at("label").get<std::string>();
                        member.slot = layout_number(m.at("slot"));
                        member.offset = static_cast<unsigned>(m.at("offset").get<uint64_t>());
                        member.type = get(m.at("type").get<std::string>());
                        d->members.push_back(std::move(member));
                    }
                } else if (t.contains("base")) {
                    d->kind = TypeDesc::Kind::kOpaque;  // fixed-size arrays
                } else {
                    d->kind = TypeDesc::Kind::kValue;
                    d->label = value_label(d->label);
                    if (bytes == 0 || bytes > 32) throw Error(ErrorCode::kMalformedLayout, "bad value width for " + d->label);
                    d->width = static_cast<unsigned>(bytes);
                }
            } else {
                throw Error(ErrorCode::kMalformedLayout, "unknown encoding " + encoding);
            }
            return d;
        }

        const nlohmann::json& types_;
        std::map<std::string, TypeDescPtr> cache_;
        int depth_{0};
    };

}  // namespace detail

/// Parse a compiler storageLayout JSON object ({storage, types}).
inline LayoutIndex parse_layout(std::string_view layout_json) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(layout_json);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kMalformedLayout, e.what());
    }
    if (j.contains("storageLayout")) j = j.at("storageLayout");
    LayoutIndex index;
    try {
        const auto& types = j.contains("types") && !j.at("types").is_null() ? j.at("types") : nlohmann::json::object();
        detail::TypeTableParser parser{types};
        for (const auto& s : j.at("storage")) {
            LayoutEntry e;
            e.label = s.at("label").get<std::string>();
            e.slot = Word::from_u64(detail::layout_number(s.at("slot")));
            e.offset = static_cast<unsigned>(s.at("offset").get<uint64_t>());
            e.type = parser.get(s.at("type").get<std::string>());
            if (e.offset > 31) throw Error(ErrorCode::kMalformedLayout, "offset out of range for " + e.label);
            index.entries.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kMalformedLayout, e.what());
    }
    for (size_t a = 0; a < index.entries.size(); ++a) {
        const auto& x = index.entries[a];
        for (size_t b = a + 1; b < index.entries.size(); ++b) {
            const auto& y = index.entries[b];
            if (x.label == y.label) throw Error(ErrorCode::kMalformedLayout, "duplicate label " + x.label);
            if (x.slot != y.slot || x.type->kind != TypeDesc::Kind::kValue || y.type->kind != TypeDesc::Kind::kValue)
                continue;
            if (x.offset < y.offset + y.type->width && y.offset < x.offset + x.type->width)
                throw Error(ErrorCode::kMalformedLayout, "overlapping entries " + x.label + " and " + y.label);
        }
    }
    return index;
}

/// Extract a value-type field packed at `offset` (counted from the low-order end).
inline TypedValue decode_slot_value(const TypeDesc& desc, const Word& raw, unsigned offset) {
    if (desc.kind != TypeDesc::Kind::kValue) throw Error(ErrorCode::kUnsupportedType, desc.label);
    if (offset + desc.width > 32) throw Error(ErrorCode::kUnsupportedType, "field exceeds slot: " + desc.label);
    size_t end = 32 - offset;
    size_t begin = end - desc.width;
    const std::string& t = desc.label;
    if (t == "address") {
        Word w;
        std::copy(raw.bytes.begin() + end - 20, raw.bytes.begin() + end, w.bytes.begin() + 12);
        return TypedValue::address(w);
    }
    if (t == "bool") {
        bool nonzero = false;
        for (size_t i = begin; i < end; ++i) nonzero |= raw.bytes[i] != 0;
        return TypedValue::boolean(nonzero);
    }
    if (t.rfind("bytes", 0) == 0 && t.size() > 5) return TypedValue::fixed_bytes(Bytes(raw.bytes.begin() + begin, raw.bytes.begin() + end), t);
    BigInt v;
    for (size_t i = begin; i < end; ++i) v = (v << 8) | raw.bytes[i];
    if (t.rfind("uint", 0) == 0) return TypedValue::unsigned_int(std::move(v), t);
    if (t.rfind("int", 0) == 0) {
        unsigned bits = desc.width * 8;
        if (v >> (bits - 1) != 0) v -= BigInt{1} << bits;
        return TypedValue::signed_int(std::move(v), t);
    }
    throw Error(ErrorCode::kUnsupportedType, t);
}

/// Where a storage slot lives in the declared layout.
struct SlotLocation {
    std::string label;
    std::vector<Word> key_path;
    std::optional<uint64_t> index;  // dynamic array element
    std::string member;             // struct member (array elements and mapping values)
    bool length{false};             // slot holds a dynamic array's length
    TypeDescPtr type;               // value type decoded at this slot, or the array type for `length`
    unsigned offset{0};

    bool operator==(const SlotLocation& o) const {
        return label == o.label && key_path == o.key_path && index == o.index && member == o.member &&
               length == o.length && offset == o.offset;
    }
};

/// Precomputes every slot reachable from the layout under a set of candidate
/// mapping keys, then answers slot lookups.
class SlotResolver {
  public:
    static constexpr size_t kMaxKeyDepth = 3;

    SlotResolver(const LayoutIndex& layout, const std::vector<Word>& candidate_keys) : keys_(candidate_keys) {
        std::sort(keys_.begin(), keys_.end());
        keys_.erase(std::unique(keys_.begin(), keys_.end()), keys_.end());
        for (const auto& e : layout.entries) {
            SlotLocation loc;
            loc.label = e.label;
            expand(e.type, e.slot, e.offset, loc);
        }
    }

    /// All variables stored in `slot` (several for packed slots), in offset order.
    [[nodiscard]] std::vector<SlotLocation> locate(const Word& slot) const {
        if (auto it = direct_.find(slot); it != direct_.end()) return it->second;
        std::vector<SlotLocation> out;
        BigInt s = slot.to_uint();
        for (const auto& region : arrays_) {
            if (s < region.start) continue;
            BigInt diff = s - region.start;
            if (diff >= region.limit) continue;
            auto d = static_cast<uint64_t>(diff);
            const TypeDesc& elem = *region.element;
            if (elem.kind == TypeDesc::Kind::kValue && elem.width <= 16) {
                uint64_t per_slot = 32 / elem.width;
                for (uint64_t k = 0; k < per_slot; ++k) {
                    SlotLocation loc = region.base;
                    loc.index = d * per_slot + k;
                    loc.type = region.element;
                    loc.offset = static_cast<unsigned>(k * elem.width);
                    out.push_back(std::move(loc));
                }
            } else if (elem.kind == TypeDesc::Kind::kValue) {
                SlotLocation loc = region.base;
                loc.index = d;
                loc.type = region.element;
                out.push_back(std::move(loc));
            } else if (elem.kind == TypeDesc::Kind::kStruct) {
                uint64_t idx = d / elem.slots, sub = d % elem.slots;
                for (const auto& m : elem.members) {
                    if (m.slot != sub || m.type->kind != TypeDesc::Kind::kValue) continue;
                    SlotLocation loc = region.base;
                    loc.index = idx;
                    loc.member = m.label;
                    loc.type = m.type;
                    loc.offset = m.offset;
                    out.push_back(std::move(loc));
                }
            }
            if (!out.empty()) break;
        }
        return out;
    }

  private:
    struct ArrayRegion {
        BigInt start;
        BigInt limit;
        TypeDescPtr element;
        SlotLocation base;
    };

    void add(const Word& slot, SlotLocation loc) {
        auto& v = direct_[slot];
        auto pos = std::find_if(v.begin(), v.end(), [&](const SlotLocation& x) { return x.offset > loc.offset; });
        v.insert(pos, std::move(loc));
    }

    void expand(const TypeDescPtr& type, const Word& slot, unsigned offset, SlotLocation loc) {
        switch (type->kind) {
            case TypeDesc::Kind::kValue:
                loc.type = type;
                loc.offset = offset;
                add(slot, std::move(loc));
                break;
            case TypeDesc::Kind::kStruct:
                for (const auto& m : type->members) {
                    if (!loc.member.empty()) break;  // nested structs flatten one level
                    SlotLocation sub = loc;
                    sub.member = m.label;
                    expand(m.type, slot_add(slot, m.slot), m.offset, std::move(sub));
                }
                break;
            case TypeDesc::Kind::kMapping:
                if (loc.key_path.size() >= kMaxKeyDepth || !loc.member.empty()) break;
                for (const auto& k : keys_) {
                    SlotLocation sub = loc;
                    sub.key_path.push_back(k);
                    expand(type->value, mapping_slot(k, slot), 0, std::move(sub));
                }
                break;
            case TypeDesc::Kind::kDynArray: {
                if (!loc.member.empty()) break;
                SlotLocation len = loc;
                len.length = true;
                len.type = type;
                add(slot, std::move(len));
                const TypeDesc& elem = *type->value;
                if (elem.kind != TypeDesc::Kind::kValue && elem.kind != TypeDesc::Kind::kStruct) break;
                arrays_.push_back({array_data_slot(slot).to_uint(), BigInt{1} << 32, type->value, std::move(loc)});
                break;
            }
            case TypeDesc::Kind::kOpaque: break;
        }
    }

    std::vector<Word> keys_;
    std::unordered_map<Word, std::vector<SlotLocation>> direct_;
    std::vector<ArrayRegion> arrays_;
};

/// Recompute the slot of a located variable from its base slot and key path.
inline Word slot_of(const LayoutIndex& layout, const SlotLocation& loc) {
    const LayoutEntry* e = layout.find(loc.label);
    if (!e) throw Error(ErrorCode::kMalformedLayout, "unknown label " + loc.label);
    Word slot = e->slot;
    TypeDescPtr t = e->type;
    for (const auto& k : loc.key_path) {
        if (t->kind != TypeDesc::Kind::kMapping) throw Error(ErrorCode::kMalformedLayout, "key path too long");
        slot = mapping_slot(k, slot);
        t = t->value;
    }
    if (loc.length) return slot;
    uint64_t member_slot = 0;
    auto struct_member = [&](const TypeDesc& s) -> uint64_t {
        for (const auto& m : s.members)
            if (m.label == loc.member) return m.slot;
        throw Error(ErrorCode::kMalformedLayout, "unknown member " + loc.member);
    };
    if (loc.index) {
        const TypeDesc& elem = *t->value;
        Word data = array_data_slot(slot);
        if (elem.kind == TypeDesc::Kind::kValue && elem.width <= 16)
            return slot_add(data, *loc.index / (32 / elem.width));
        uint64_t n = *loc.index * elem.slots;
        if (!loc.member.empty()) n += struct_member(elem);
        return slot_add(data, n);
    }
    if (!loc.member.empty()) member_slot = struct_member(*t);
    return slot_add(slot, member_slot);
}

inline std::vector<SlotLocation> locate_state_variables(const LayoutIndex& layout, const Word& slot,
                                                        const std::vector<Word>& candidate_keys) {
    return SlotResolver{layout, candidate_keys}.locate(slot);
}

inline std::optional<SlotLocation> locate_state_variable(const LayoutIndex& layout, const Word& slot,
                                                         const std::vector<Word>& candidate_keys) {
    auto all = locate_state_variables(layout, slot, candidate_keys);
    if (all.empty()) return std::nullopt;
    return all.front();
}

}  // namespace txoracle
