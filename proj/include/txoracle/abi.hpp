// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "keccak.hpp"
#include "typed_value.hpp"

namespace txoracle {

/// Parsed solidity ABI type.
struct AbiType {
    enum class Kind { kAddress, kUint, kInt, kBool, kFixedBytes, kBytes, kString, kArray, kFixedArray, kTuple };

    Kind kind{Kind::kUint};
    unsigned bits{256};   // uint/int width, or byte count for bytesN
    size_t length{0};     // T[k]
    std::vector<AbiType> components;  // element type (arrays) or members (tuple)
    std::vector<std::string> names;   // tuple member names

    [[nodiscard]] bool is_dynamic() const {
        switch (kind) {
            case Kind::kBytes:
            case Kind::kString:
            case Kind::kArray: return true;
            case Kind::kFixedArray: return components.front().is_dynamic();
            case Kind::kTuple:
                for (const auto& c : components)
                    if (c.is_dynamic()) return true;
                return false;
            default: return false;
        }
    }

    /// Bytes this type occupies in the head of an enclosing tuple.
    [[nodiscard]] size_t head_size() const {
        if (is_dynamic()) return 32;
        if (kind == Kind::kFixedArray) return length * components.front().head_size();
        if (kind == Kind::kTuple) {
            size_t n = 0;
            for (const auto& c : components) n += c.head_size();
            return n;
        }
        return 32;
    }

    /// Canonical type string as used in signatures.
    [[nodiscard]] std::string canonical() const {
        switch (kind) {
            case Kind::kAddress: return "address";
            case Kind::kUint: return "uint" + std::to_string(bits);
            case Kind::kInt: return "int" + std::to_string(bits);
            case Kind::kBool: return "bool";
            case Kind::kFixedBytes: return "bytes" + std::to_string(bits);
            case Kind::kBytes: return "bytes";
            case Kind::kString: return "string";
            case Kind::kArray: return components.front().canonical() + "[]";
            case Kind::kFixedArray: return components.front().canonical() + "[" + std::to_string(length) + "]";
            case Kind::kTuple: {
                std::string s = "(";
                for (size_t i = 0; i < components.size(); ++i) {
                    if (i) s += ",";
                    s += components[i].canonical();
                }
                return s + ")";
            }
        }
        return "?";
    }
};

namespace detail {

    inline AbiType parse_elementary(const std::string& t) {
        AbiType out;
        auto width = [&](size_t prefix, unsigned dflt) -> unsigned {
            if (t.size() == prefix) return dflt;
            auto rest = t.substr(prefix);
            if (rest.find_first_not_of("0123456789") != std::string::npos || rest.size() > 3)
                throw Error(ErrorCode::kMalformedAbi, "unknown type " + t);
            return static_cast<unsigned>(std::stoul(rest));
        };
        if (t == "address") {
            out.kind = AbiType::Kind::kAddress;
        } else if (t == "bool") {
            out.kind = AbiType::Kind::kBool;
        } else if (t == "string") {
            out.kind = AbiType::Kind::kString;
        } else if (t == "bytes") {
            out.kind = AbiType::Kind::kBytes;
        } else if (t.rfind("uint", 0) == 0) {
            out.kind = AbiType::Kind::kUint;
            out.bits = width(4, 256);
            if (out.bits == 0 || out.bits > 256 || out.bits % 8) throw Error(ErrorCode::kMalformedAbi, "bad width " + t);
        } else if (t.rfind("int", 0) == 0) {
            out.kind = AbiType::Kind::kInt;
            out.bits = width(3, 256);
            if (out.bits == 0 || out.bits > 256 || out.bits % 8) throw Error(ErrorCode::kMalformedAbi, "bad width " + t);
        } else if (t.rfind("bytes", 0) == 0) {
            out.kind = AbiType::Kind::kFixedBytes;
            out.bits = width(5, 0);
            if (out.bits == 0 || out.bits > 32) throw Error(ErrorCode::kMalformedAbi, "bad width " + t);
        } else {
            throw Error(ErrorCode::kMalformedAbi, "unknown type " + t);
        }
        return out;
    }

    inline AbiType parse_abi_param_type(const std::string& type, const nlohmann::json& param) {
        if (!type.empty() && type.back() == ']') {
            auto open = type.rfind('[');
            if (open == std::string::npos) throw Error(ErrorCode::kMalformedAbi, "unknown type " + type);
            AbiType out;
            out.components.push_back(parse_abi_param_type(type.substr(0, open), param));
            auto len = type.substr(open + 1, type.size() - open - 2);
            if (len.empty()) {
                out.kind = AbiType::Kind::kArray;
            } else {
                if (len.find_first_not_of("0123456789") != std::string::npos)
                    throw Error(ErrorCode::kMalformedAbi, "unknown type " + type);
                out.kind = AbiType::Kind::kFixedArray;
                out.length = std::stoul(len);
            }
            return out;
        }
        if (type == "tuple") {
            AbiType out;
            out.kind = AbiType::Kind::kTuple;
            if (!param.contains("components")) throw Error(ErrorCode::kMalformedAbi, "tuple without components");
            for (const auto& c : param.at("components")) {
                out.components.push_back(parse_abi_param_type(c.at("type").get<std::string>(), c));
                out.names.push_back(c.value("name", std::string{}));
            }
            return out;
        }
        return parse_elementary(type);
    }

}  // namespace detail

inline AbiType parse_abi_type(const std::string& type) { return detail::parse_abi_param_type(type, nlohmann::json::object()); }

struct AbiParam {
    std::string name;
    AbiType type;
    bool indexed{false};
};

struct AbiFunction {
    std::string name;
    std::string signature;
    uint32_t selector{0};
    std::vector<AbiParam> inputs;
};

struct AbiEvent {
    std::string name;
    std::string signature;
    Word topic0;
    std::vector<AbiParam> inputs;
};

struct AbiIndex {
    std::map<uint32_t, AbiFunction> functions;
    std::map<Word, AbiEvent> events;

    [[nodiscard]] const AbiFunction* function_by_name(std::string_view name) const {
        for (const auto& [_, f] : functions)
            if (f.name == name) return &f;
        return nullptr;
    }
    [[nodiscard]] const AbiEvent* event_by_name(std::string_view name) const {
        for (const auto& [_, e] : events)
            if (e.name == name) return &e;
        return nullptr;
    }
};

inline std::string selector_hex(uint32_t selector) {
    uint8_t b[4] = {static_cast<uint8_t>(selector >> 24), static_cast<uint8_t>(selector >> 16),
                    static_cast<uint8_t>(selector >> 8), static_cast<uint8_t>(selector)};
    return bytes_to_hex(b, 4);
}

inline uint32_t selector_of(std::string_view signature) {
    Word h = keccak256(signature);
    return (uint32_t{h.bytes[0]} << 24) | (uint32_t{h.bytes[1]} << 16) | (uint32_t{h.bytes[2]} << 8) | h.bytes[3];
}

namespace detail {

    inline std::string signature_of(const std::string& name, const std::vector<AbiParam>& params) {
        std::string sig = name + "(";
        for (size_t i = 0; i < params.size(); ++i) {
            if (i) sig += ",";
            sig += params[i].type.canonical();
        }
        return sig + ")";
    }

    inline std::vector<AbiParam> parse_params(const nlohmann::json& list) {
        std::vector<AbiParam> out;
        for (size_t i = 0; i < list.size(); ++i) {
            const auto& p = list[i];
            AbiParam param;
            param.name = p.value("name", std::string{});
            if (param.name.empty()) param.name = "arg" + std::to_string(i);
            param.type = parse_abi_param_type(p.at("type").get<std::string>(), p);
            param.indexed = p.value("indexed", false);
            out.push_back(std::move(param));
        }
        return out;
    }

}  // namespace detail

/// Index a compiler-emitted ABI JSON array by selector and topic0.
inline AbiIndex parse_abi(std::string_view abi_json) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(abi_json);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kMalformedAbi, e.what());
    }
    if (j.is_object() && j.contains("abi")) j = j.at("abi");
    if (!j.is_array()) throw Error(ErrorCode::kMalformedAbi, "ABI must be a JSON array");

    AbiIndex index;
    try {
        for (const auto& entry : j) {
            auto kind = entry.value("type", std::string{"function"});
            if (kind == "function") {
                AbiFunction f;
                f.name = entry.at("name").get<std::string>();
                f.inputs = detail::parse_params(entry.value("inputs", nlohmann::json::array()));
                f.signature = detail::signature_of(f.name, f.inputs);
                f.selector = selector_of(f.signature);
                if (!index.functions.emplace(f.selector, f).second)
                    throw Error(ErrorCode::kMalformedAbi, "duplicate selector for " + f.signature);
            } else if (kind == "event") {
                if (entry.value("anonymous", false)) continue;
                AbiEvent e;
                e.name = entry.at("name").get<std::string>();
                e.inputs = detail::parse_params(entry.value("inputs", nlohmann::json::array()));
                e.signature = detail::signature_of(e.name, e.inputs);
                e.topic0 = keccak256(e.signature);
                if (!index.events.emplace(e.topic0, e).second)
                    throw Error(ErrorCode::kMalformedAbi, "duplicate topic0 for " + e.signature);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kMalformedAbi, e.what());
    }
    return index;
}

// ---------------------------------------------------------------------------
// head/tail codec

namespace detail {

    struct DecodeFailure {
        std::string what;
    };

    inline const uint8_t* word_at(std::span<const uint8_t> data, size_t pos) {
        if (pos > data.size() || data.size() - pos < 32) throw DecodeFailure{"read past end at offset " + std::to_string(pos)};
        return data.data() + pos;
    }

    inline size_t read_size(std::span<const uint8_t> data, size_t pos) {
        Word w = Word::from_span(word_at(data, pos));
        for (int i = 0; i < 24; ++i)
            if (w.bytes[i]) throw DecodeFailure{"offset/length too large"};
        uint64_t v = 0;
        for (int i = 24; i < 32; ++i) v = (v << 8) | w.bytes[i];
        if (v > data.size()) throw DecodeFailure{"offset/length exceeds data"};
        return static_cast<size_t>(v);
    }

    TypedValue decode_at(const AbiType& type, std::span<const uint8_t> data, size_t pos);

    inline std::vector<TypedValue> decode_sequence(const std::vector<AbiType>& types, std::span<const uint8_t> data,
                                                   size_t base) {
        std::vector<TypedValue> out;
        size_t head = base;
        for (const auto& t : types) {
            if (t.is_dynamic()) {
                size_t off = read_size(data, head);
                out.push_back(decode_at(t, data, base + off));
            } else {
                out.push_back(decode_at(t, data, head));
            }
            head += t.head_size();
        }
        return out;
    }

    inline TypedValue decode_at(const AbiType& type, std::span<const uint8_t> data, size_t pos) {
        using K = AbiType::Kind;
        switch (type.kind) {
            case K::kAddress: {
                Word w = Word::from_span(word_at(data, pos));
                if (!w.fits_address()) throw DecodeFailure{"dirty address padding"};
                return TypedValue::address(w);
            }
            case K::kUint: {
                BigInt v = Word::from_span(word_at(data, pos)).to_uint();
                if (type.bits < 256 && v >> type.bits != 0) throw DecodeFailure{"value exceeds declared width"};
                return TypedValue::unsigned_int(std::move(v), type.canonical());
            }
            case K::kInt: {
                BigInt v = Word::from_span(word_at(data, pos)).to_uint();
                if (v >> 255 != 0) v -= two_pow_256();
                BigInt lim = BigInt{1} << (type.bits - 1);
                if (v >= lim || v < -lim) throw DecodeFailure{"value exceeds declared width"};
                return TypedValue::signed_int(std::move(v), type.canonical());
            }
            case K::kBool: {
                BigInt v = Word::from_span(word_at(data, pos)).to_uint();
                if (v > 1) throw DecodeFailure{"bool out of range"};
                return TypedValue::boolean(v == 1);
            }
            case K::kFixedBytes: {
                const uint8_t* p = word_at(data, pos);
                return TypedValue::fixed_bytes(Bytes(p, p + type.bits), type.canonical());
            }
            case K::kBytes:
            case K::kString: {
                size_t len = read_size(data, pos);
                size_t start = pos + 32;
                if (start > data.size() || data.size() - start < len) throw DecodeFailure{"bytes past end"};
                return TypedValue::fixed_bytes(Bytes(data.begin() + start, data.begin() + start + len), type.canonical());
            }
            case K::kArray: {
                size_t len = read_size(data, pos);
                TypedValue v{ValueTag::kArray, type.canonical(), {}, {}, {}, {}};
                v.items = decode_sequence(std::vector<AbiType>(len, type.components.front()), data, pos + 32);
                return v;
            }
            case K::kFixedArray: {
                TypedValue v{ValueTag::kArray, type.canonical(), {}, {}, {}, {}};
                v.items = decode_sequence(std::vector<AbiType>(type.length, type.components.front()), data, pos);
                return v;
            }
            case K::kTuple: {
                TypedValue v{ValueTag::kStruct, type.canonical(), {}, {}, {}, {}};
                v.items = decode_sequence(type.components, data, pos);
                v.member_names = type.names;
                return v;
            }
        }
        throw DecodeFailure{"unreachable"};
    }

    inline void put_word(Bytes& out, const Word& w) { out.insert(out.end(), w.bytes.begin(), w.bytes.end()); }

    inline Word int_word(const BigInt& v) { return Word::from_uint(v < 0 ? BigInt{v + two_pow_256()} : v); }

    Bytes encode_value(const AbiType& type, const TypedValue& value);

    inline Bytes encode_sequence(const std::vector<AbiType>& types, const std::vector<TypedValue>& values) {
        if (types.size() != values.size()) throw Error(ErrorCode::kMalformedValue, "arity mismatch in ABI encode");
        size_t head_len = 0;
        for (const auto& t : types) head_len += t.head_size();
        Bytes head, tail;
        for (size_t i = 0; i < types.size(); ++i) {
            Bytes enc = encode_value(types[i], values[i]);
            if (types[i].is_dynamic()) {
                put_word(head, Word::from_u64(head_len + tail.size()));
                tail.insert(tail.end(), enc.begin(), enc.end());
            } else {
                head.insert(head.end(), enc.begin(), enc.end());
            }
        }
        head.insert(head.end(), tail.begin(), tail.end());
        return head;
    }

    inline Bytes encode_value(const AbiType& type, const TypedValue& value) {
        using K = AbiType::Kind;
        Bytes out;
        switch (type.kind) {
            case K::kAddress:
            case K::kUint:
            case K::kBool: put_word(out, Word::from_uint(value.number)); break;
            case K::kInt: put_word(out, int_word(value.number)); break;
            case K::kFixedBytes: {
                Word w;
                std::copy_n(value.bytes.begin(), std::min<size_t>(value.bytes.size(), 32), w.bytes.begin());
                put_word(out, w);
                break;
            }
            case K::kBytes:
            case K::kString: {
                put_word(out, Word::from_u64(value.bytes.size()));
                out.insert(out.end(), value.bytes.begin(), value.bytes.end());
                out.resize(out.size() + (32 - value.bytes.size() % 32) % 32, 0);
                break;
            }
            case K::kArray: {
                put_word(out, Word::from_u64(value.items.size()));
                Bytes body = encode_sequence(std::vector<AbiType>(value.items.size(), type.components.front()), value.items);
                out.insert(out.end(), body.begin(), body.end());
                break;
            }
            case K::kFixedArray:
                out = encode_sequence(std::vector<AbiType>(type.length, type.components.front()), value.items);
                break;
            case K::kTuple: out = encode_sequence(type.components, value.items); break;
        }
        return out;
    }

    inline std::vector<AbiType> types_of(const std::vector<AbiParam>& params, std::optional<bool> indexed = std::nullopt) {
        std::vector<AbiType> out;
        for (const auto& p : params)
            if (!indexed || p.indexed == *indexed) out.push_back(p.type);
        return out;
    }

}  // namespace detail

using NamedValues = std::vector<std::pair<std::string, TypedValue>>;

struct DecodedCall {
    std::string function;
    uint32_t selector{0};
    NamedValues params;
};

struct DecodedEvent {
    std::string event;
    NamedValues params;
};

inline DecodedCall decode_calldata(const AbiIndex& abi, std::span<const uint8_t> calldata) {
    if (calldata.size() < 4) throw Error(ErrorCode::kTruncatedCalldata, "calldata shorter than a selector");
    uint32_t sel = (uint32_t{calldata[0]} << 24) | (uint32_t{calldata[1]} << 16) | (uint32_t{calldata[2]} << 8) | calldata[3];
    auto it = abi.functions.find(sel);
    if (it == abi.functions.end()) throw Error(ErrorCode::kUnknownSelector, selector_hex(sel));
    const auto& fn = it->second;
    DecodedCall out{fn.name, sel, {}};
    try {
        auto values = detail::decode_sequence(detail::types_of(fn.inputs), calldata.subspan(4), 0);
        for (size_t i = 0; i < values.size(); ++i) out.params.emplace_back(fn.inputs[i].name, std::move(values[i]));
    } catch (const detail::DecodeFailure& f) {
        throw Error(ErrorCode::kTruncatedCalldata, fn.signature + ": " + f.what);
    }
    return out;
}

inline DecodedEvent decode_event(const AbiIndex& abi, const std::vector<Word>& topics, std::span<const uint8_t> data) {
    if (topics.empty()) throw Error(ErrorCode::kUnknownEvent, "event without topic0");
    auto it = abi.events.find(topics.front());
    if (it == abi.events.end()) throw Error(ErrorCode::kUnknownEvent, topics.front().hex());
    const auto& ev = it->second;
    DecodedEvent out{ev.name, {}};
    try {
        auto data_values = detail::decode_sequence(detail::types_of(ev.inputs, false), data, 0);
        size_t topic_i = 1, data_i = 0;
        for (const auto& p : ev.inputs) {
            if (p.indexed) {
                if (topic_i >= topics.size()) throw detail::DecodeFailure{"missing topic for " + p.name};
                const Word& t = topics[topic_i++];
                if (p.type.is_dynamic() || p.type.kind == AbiType::Kind::kTuple || p.type.kind == AbiType::Kind::kFixedArray)
                    out.params.emplace_back(p.name, TypedValue::fixed_bytes(Bytes(t.bytes.begin(), t.bytes.end()), "bytes32"));
                else
                    out.params.emplace_back(p.name, detail::decode_at(p.type, std::span<const uint8_t>{t.bytes}, 0));
            } else {
                out.params.emplace_back(p.name, std::move(data_values[data_i++]));
            }
        }
        if (topic_i != topics.size()) throw detail::DecodeFailure{"unexpected extra topics"};
    } catch (const detail::DecodeFailure& f) {
        throw Error(ErrorCode::kMalformedEventData, ev.signature + ": " + f.what);
    }
    return out;
}

inline Bytes encode_call(const AbiFunction& fn, const std::vector<TypedValue>& args) {
    Bytes out{static_cast<uint8_t>(fn.selector >> 24), static_cast<uint8_t>(fn.selector >> 16),
              static_cast<uint8_t>(fn.selector >> 8), static_cast<uint8_t>(fn.selector)};
    Bytes body = detail::encode_sequence(detail::types_of(fn.inputs), args);
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

struct EncodedLog {
    std::vector<Word> topics;
    Bytes data;
};

/// `args` are given in declaration order; indexed ones go to topics.
inline EncodedLog encode_event(const AbiEvent& ev, const std::vector<TypedValue>& args) {
    if (args.size() != ev.inputs.size()) throw Error(ErrorCode::kMalformedValue, "arity mismatch for " + ev.signature);
    EncodedLog out;
    out.topics.push_back(ev.topic0);
    std::vector<AbiType> data_types;
    std::vector<TypedValue> data_values;
    for (size_t i = 0; i < args.size(); ++i) {
        const auto& p = ev.inputs[i];
        if (p.indexed) {
            if (p.type.is_dynamic()) {
                out.topics.push_back(keccak256(std::span<const uint8_t>{args[i].bytes}));
            } else {
                Bytes enc = detail::encode_value(p.type, args[i]);
                out.topics.push_back(Word::from_span(enc.data()));
            }
        } else {
            data_types.push_back(p.type);
            data_values.push_back(args[i]);
        }
    }
    out.data = detail::encode_sequence(data_types, data_values);
    return out;
}

}  // namespace txoracle
