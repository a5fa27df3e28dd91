// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "word.hpp"

namespace txoracle {

/// Snapshot location inside one call: around the call itself, or around its
/// i-th subcall to an external contract.
struct RecordPoint {
    enum class Kind : uint8_t { kPreCall, kPostCall, kPreSubCall, kPostSubCall };

    Kind kind{Kind::kPreCall};
    uint32_t index{0};

    static RecordPoint pre_call() { return {Kind::kPreCall, 0}; }
    static RecordPoint post_call() { return {Kind::kPostCall, 0}; }
    static RecordPoint pre_sub(uint32_t i) { return {Kind::kPreSubCall, i}; }
    static RecordPoint post_sub(uint32_t i) { return {Kind::kPostSubCall, i}; }

    [[nodiscard]] bool is_sub() const { return kind == Kind::kPreSubCall || kind == Kind::kPostSubCall; }

    /// The matching end of a Pre point (PostCall for PreCall, PostSubCall(i) for PreSubCall(i)).
    [[nodiscard]] RecordPoint partner() const {
        switch (kind) {
            case Kind::kPreCall: return post_call();
            case Kind::kPostCall: return pre_call();
            case Kind::kPreSubCall: return post_sub(index);
            case Kind::kPostSubCall: return pre_sub(index);
        }
        return *this;
    }

    auto operator<=>(const RecordPoint&) const = default;
};

inline std::string_view point_kind_name(RecordPoint::Kind k) {
    switch (k) {
        case RecordPoint::Kind::kPreCall: return "PreCall";
        case RecordPoint::Kind::kPostCall: return "PostCall";
        case RecordPoint::Kind::kPreSubCall: return "PreSubCall";
        case RecordPoint::Kind::kPostSubCall: return "PostSubCall";
    }
    return "?";
}

inline RecordPoint::Kind point_kind_from_name(std::string_view s) {
    for (auto k : {RecordPoint::Kind::kPreCall, RecordPoint::Kind::kPostCall, RecordPoint::Kind::kPreSubCall,
                   RecordPoint::Kind::kPostSubCall})
        if (point_kind_name(k) == s) return k;
    throw Error(ErrorCode::kMalformedRecord, "unknown record point " + std::string{s});
}

/// "PreCall", "PostCall", "PreSubCall(2)", ...
inline std::string to_string(const RecordPoint& p) {
    std::string s{point_kind_name(p.kind)};
    if (p.is_sub()) s += "(" + std::to_string(p.index) + ")";
    return s;
}

inline RecordPoint parse_record_point(std::string_view s) {
    auto open = s.find('(');
    if (open == std::string_view::npos) {
        auto k = point_kind_from_name(s);
        if (k == RecordPoint::Kind::kPreSubCall || k == RecordPoint::Kind::kPostSubCall)
            throw Error(ErrorCode::kMalformedRecord, "subcall point without index");
        return {k, 0};
    }
    if (s.back() != ')') throw Error(ErrorCode::kMalformedRecord, "bad record point " + std::string{s});
    auto k = point_kind_from_name(s.substr(0, open));
    auto digits = s.substr(open + 1, s.size() - open - 2);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string_view::npos)
        throw Error(ErrorCode::kMalformedRecord, "bad record point " + std::string{s});
    return {k, static_cast<uint32_t>(std::stoul(std::string{digits}))};
}

struct TxHeader {
    Word tx_hash;
    uint64_t block{0};
    uint64_t timestamp{0};
    Word origin;
    std::vector<Word> key_hints;

    bool operator==(const TxHeader&) const = default;
};

struct CallEnter {
    Word sender;
    Word receiver;
    Bytes calldata;
    BigInt value;
    bool operator==(const CallEnter&) const = default;
};

struct CallExit {
    bool success{true};
    bool operator==(const CallExit&) const = default;
};

struct Jumpi {
    uint64_t pc{0};
    bool operator==(const Jumpi&) const = default;
};

struct EventEmit {
    Word emitter;
    std::vector<Word> topics;
    Bytes data;
    bool operator==(const EventEmit&) const = default;
};

struct StorageAccess {
    Word contract;
    Word slot;
    Word pre;
    Word post;
    bool write{false};
    bool operator==(const StorageAccess&) const = default;
};

struct BalanceObservation {
    Word token;  // ether_marker() for ETH
    Word holder;
    RecordPoint point;
    BigInt amount;
    bool operator==(const BalanceObservation&) const = default;
};

using Step = std::variant<CallEnter, CallExit, Jumpi, EventEmit, StorageAccess, BalanceObservation>;

struct RawTxRecord {
    TxHeader header;
    std::vector<Step> steps;
    bool operator==(const RawTxRecord&) const = default;
};

namespace detail {

    inline std::string render_address(const Word& w) { return w.fits_address() ? address_hex(w) : w.hex(); }

    inline Word token_from_json(const nlohmann::json& j) {
        auto s = j.get<std::string>();
        if (s == "ETH") return ether_marker();
        return parse_word_or_address(s);
    }

    inline uint64_t u64_from_json(const nlohmann::json& j) {
        if (j.is_number_unsigned()) return j.get<uint64_t>();
        if (j.is_string()) {
            BigInt v = parse_integer(j.get<std::string>());
            if (v < 0 || v > std::numeric_limits<uint64_t>::max())
                throw Error(ErrorCode::kMalformedRecord, "integer out of range");
            return static_cast<uint64_t>(v);
        }
        throw Error(ErrorCode::kMalformedRecord, "expected unsigned integer");
    }

    inline BigInt amount_from_json(const nlohmann::json& j) {
        if (j.is_number_unsigned()) return BigInt{j.get<uint64_t>()};
        if (j.is_string()) return parse_integer(j.get<std::string>());
        throw Error(ErrorCode::kMalformedRecord, "expected amount");
    }

}  // namespace detail

inline nlohmann::json to_json(const RawTxRecord& r) {
    using nlohmann::json;
    json header{{"txHash", r.header.tx_hash.hex()},
                {"block", r.header.block},
                {"timestamp", r.header.timestamp},
                {"origin", detail::render_address(r.header.origin)}};
    if (!r.header.key_hints.empty()) {
        auto hints = json::array();
        for (const auto& k : r.header.key_hints) hints.push_back(k.hex());
        header["keyHints"] = std::move(hints);
    }
    auto steps = json::array();
    for (const auto& step : r.steps) {
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, CallEnter>) {
                    steps.push_back({{"step", "CallEnter"},
                                     {"sender", detail::render_address(s.sender)},
                                     {"receiver", detail::render_address(s.receiver)},
                                     {"calldata", bytes_to_hex(s.calldata)},
                                     {"value", to_decimal(s.value)}});
                } else if constexpr (std::is_same_v<T, CallExit>) {
                    steps.push_back({{"step", "CallExit"}, {"success", s.success}});
                } else if constexpr (std::is_same_v<T, Jumpi>) {
                    steps.push_back({{"step", "Jumpi"}, {"pc", s.pc}});
                } else if constexpr (std::is_same_v<T, EventEmit>) {
                    auto topics = json::array();
                    for (const auto& t : s.topics) topics.push_back(t.hex());
                    steps.push_back({{"step", "EventEmit"},
                                     {"emitter", detail::render_address(s.emitter)},
                                     {"topics", std::move(topics)},
                                     {"data", bytes_to_hex(s.data)}});
                } else if constexpr (std::is_same_v<T, StorageAccess>) {
                    steps.push_back({{"step", "StorageAccess"},
                                     {"contract", detail::render_address(s.contract)},
                                     {"slot", s.slot.hex()},
                                     {"pre", s.pre.hex()},
                                     {"post", s.post.hex()},
                                     {"kind", s.write ? "write" : "read"}});
                } else {
                    json j{{"step", "BalanceObservation"},
                           {"token", s.token == ether_marker() ? std::string{"ETH"} : detail::render_address(s.token)},
                           {"holder", detail::render_address(s.holder)},
                           {"point", std::string{point_kind_name(s.point.kind)}},
                           {"amount", to_decimal(s.amount)}};
                    if (s.point.is_sub()) j["index"] = s.point.index;
                    steps.push_back(std::move(j));
                }
            },
            step);
    }
    return json{{"header", std::move(header)}, {"steps", std::move(steps)}};
}

inline RawTxRecord raw_record_from_json(const nlohmann::json& j) {
    RawTxRecord r;
    try {
        const auto& h = j.at("header");
        r.header.tx_hash = Word::from_hex(h.at("txHash").get<std::string>());
        r.header.block = detail::u64_from_json(h.at("block"));
        r.header.timestamp = detail::u64_from_json(h.at("timestamp"));
        r.header.origin = parse_word_or_address(h.at("origin").get<std::string>());
        if (h.contains("keyHints"))
            for (const auto& k : h.at("keyHints")) r.header.key_hints.push_back(parse_word_or_address(k.get<std::string>()));
        for (const auto& s : j.at("steps")) {
            auto tag = s.at("step").get<std::string>();
            if (tag == "CallEnter") {
                r.steps.emplace_back(CallEnter{parse_word_or_address(s.at("sender").get<std::string>()),
                                               parse_word_or_address(s.at("receiver").get<std::string>()),
                                               bytes_from_hex(s.value("calldata", std::string{"0x"})),
                                               s.contains("value") ? detail::amount_from_json(s.at("value")) : BigInt{0}});
            } else if (tag == "CallExit") {
                r.steps.emplace_back(CallExit{s.at("success").get<bool>()});
            } else if (tag == "Jumpi") {
                r.steps.emplace_back(Jumpi{detail::u64_from_json(s.at("pc"))});
            } else if (tag == "EventEmit") {
                EventEmit e;
                e.emitter = parse_word_or_address(s.at("emitter").get<std::string>());
                for (const auto& t : s.at("topics")) e.topics.push_back(Word::from_hex(t.get<std::string>()));
                e.data = bytes_from_hex(s.value("data", std::string{"0x"}));
                r.steps.emplace_back(std::move(e));
            } else if (tag == "StorageAccess") {
                auto kind = s.at("kind").get<std::string>();
                if (kind != "read" && kind != "write") throw Error(ErrorCode::kMalformedRecord, "bad access kind " + kind);
                r.steps.emplace_back(StorageAccess{parse_word_or_address(s.at("contract").get<std::string>()),
                                                   Word::from_hex(s.at("slot").get<std::string>()),
                                                   Word::from_hex(s.at("pre").get<std::string>()),
                                                   Word::from_hex(s.at("post").get<std::string>()), kind == "write"});
            } else if (tag == "BalanceObservation") {
                RecordPoint p{point_kind_from_name(s.at("point").get<std::string>()), 0};
                if (p.is_sub()) p.index = static_cast<uint32_t>(detail::u64_from_json(s.at("index")));
                r.steps.emplace_back(BalanceObservation{detail::token_from_json(s.at("token")),
                                                        parse_word_or_address(s.at("holder").get<std::string>()), p,
                                                        detail::amount_from_json(s.at("amount"))});
            } else {
                throw Error(ErrorCode::kMalformedRecord, "unknown step " + tag);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kMalformedRecord, e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::kMalformedRecord) throw;
        throw Error(ErrorCode::kMalformedRecord, e.what());
    }
    return r;
}

inline RawTxRecord parse_raw_record(std::string_view line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kMalformedRecord, e.what());
    }
    return raw_record_from_json(j);
}

}  // namespace txoracle
