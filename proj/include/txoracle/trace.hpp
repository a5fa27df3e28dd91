// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "abi.hpp"
#include "cft.hpp"
#include "layout.hpp"

namespace txoracle {

/// ABI and storage layout of the analysed contract.
struct ContractMeta {
    Word address;
    AbiIndex abi;
    LayoutIndex layout;
    std::string abi_json;
    std::string layout_json;

    static ContractMeta load(const Word& address, std::string abi_json, std::string layout_json) {
        ContractMeta m;
        m.address = address;
        m.abi = parse_abi(abi_json);
        m.layout = parse_layout(layout_json);
        m.abi_json = std::move(abi_json);
        m.layout_json = std::move(layout_json);
        return m;
    }
};

/// Label reserved for slots the layout does not explain.
inline constexpr std::string_view kAnonymousSlotLabel = "slot";

/// Identity of a scalar storage variable: label, mapping keys, struct member.
struct StateId {
    std::string label;
    std::vector<Word> keys;
    std::string member;

    auto operator<=>(const StateId&) const = default;
    bool operator==(const StateId&) const = default;
};

/// Partially observed dynamic array: only elements whose slots were touched.
struct ArrayObs {
    std::optional<BigInt> length;
    std::map<uint64_t, std::map<std::string, TypedValue>> elements;  // index -> member ("" for value elements)

    bool operator==(const ArrayObs&) const = default;
};

struct Snapshot {
    std::map<StateId, TypedValue> vars;
    std::map<StateId, ArrayObs> arrays;
    std::map<std::pair<Word, Word>, BigInt> tokens;  // (token, holder) -> amount

    bool operator==(const Snapshot&) const = default;
};

struct LogEntry {
    std::string name;
    uint32_t occurrence{0};
    NamedValues params;

    bool operator==(const LogEntry&) const = default;
};

struct TxInfo {
    Word tx_hash;
    Word sender;
    Word receiver;
    uint64_t block{0};
    uint64_t timestamp{0};
    BigInt value;

    bool operator==(const TxInfo&) const = default;
};

inline constexpr std::string_view kFallbackFunction = "fallback";
inline constexpr std::string_view kUnknownFunction = "unknown";

struct ExecutionTrace {
    Word contract;
    std::string function;
    uint32_t selector{0};
    Word branch;
    TxInfo tx;
    NamedValues params;
    std::vector<LogEntry> logs;
    std::map<RecordPoint, Snapshot> snapshots;
    uint32_t subcalls{0};
    bool reverted{false};
    uint32_t subtree{0};
    std::vector<std::string> warnings;

    bool operator==(const ExecutionTrace&) const = default;
};

/// Interesting values used as mapping keys when locating storage slots.
inline std::vector<Word> candidate_keys(const TxNode& node, const Word& contract, const NamedValues& params,
                                        const std::vector<LogEntry>& logs, const std::vector<Word>& hints = {}) {
    std::vector<Word> keys{node.sender, node.receiver, contract, Word{}};
    auto add_value = [&](const TypedValue& v, bool uints, auto& self) -> void {
        switch (v.tag) {
            case ValueTag::kAddress: keys.push_back(Word::from_uint(v.number)); break;
            case ValueTag::kUnsigned:
                if (uints) keys.push_back(Word::from_uint(v.number));
                break;
            case ValueTag::kArray:
            case ValueTag::kStruct:
                for (const auto& item : v.items) self(item, uints, self);
                break;
            default: break;
        }
    };
    for (const auto& [_, v] : params) add_value(v, true, add_value);
    for (const auto& log : logs)
        for (const auto& [_, v] : log.params) add_value(v, false, add_value);
    for (const TxNode* c : node.calls()) keys.push_back(c->receiver);
    keys.insert(keys.end(), hints.begin(), hints.end());
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    return keys;
}

namespace detail {

    /// Per-contract slot history over the whole record.
    class StorageTimeline {
      public:
        StorageTimeline(const CallFlowTree& cft, const Word& contract) {
            for (const auto& a : cft.accesses)
                if (a.access.contract == contract) by_slot_[a.access.slot].push_back(&a);
        }

        /// Value of `slot` just before stream position `t`.
        [[nodiscard]] Word value_at(const Word& slot, size_t t) const {
            const auto& list = by_slot_.at(slot);
            const TimedAccess* last = nullptr;
            for (const auto* a : list) {
                if (a->seq >= t) break;
                last = a;
            }
            if (last) return last->access.post;
            return list.front()->access.pre;
        }

      private:
        std::unordered_map<Word, std::vector<const TimedAccess*>> by_slot_;
    };

    inline std::vector<Word> subtree_slots(const CallFlowTree& cft, const TxNode& node, const Word& contract) {
        std::vector<Word> slots;
        for (const auto& a : cft.accesses)
            if (a.seq > node.enter_seq && a.seq < node.exit_seq && a.access.contract == contract)
                slots.push_back(a.access.slot);
        std::sort(slots.begin(), slots.end());
        slots.erase(std::unique(slots.begin(), slots.end()), slots.end());
        return slots;
    }

}  // namespace detail

/// Decode one call to the target contract into an execution trace.
inline ExecutionTrace extract_trace(const CallFlowTree& cft, const TxNode& node, const ContractMeta& meta,
                                    uint32_t subtree_index = 0) {
    ExecutionTrace t;
    t.contract = meta.address;
    t.subtree = subtree_index;
    t.reverted = !node.success;
    t.branch = branch_fingerprint(node);
    t.tx = {cft.header.tx_hash, node.sender, node.receiver, cft.header.block, cft.header.timestamp, node.value};

    if (node.calldata.size() < 4) {
        t.function = std::string{kFallbackFunction};
    } else {
        t.selector = (uint32_t{node.calldata[0]} << 24) | (uint32_t{node.calldata[1]} << 16) |
                     (uint32_t{node.calldata[2]} << 8) | node.calldata[3];
        try {
            auto call = decode_calldata(meta.abi, node.calldata);
            t.function = call.function;
            t.params = std::move(call.params);
        } catch (const Error& e) {
            auto it = meta.abi.functions.find(t.selector);
            t.function = it != meta.abi.functions.end() ? it->second.name : std::string{kUnknownFunction};
            t.warnings.emplace_back(e.what());
        }
    }

    std::map<std::string, uint32_t> occurrences;
    for (const auto& c : node.children) {
        const auto* ev = std::get_if<EventNode>(&c);
        if (!ev || ev->emitter != meta.address) continue;
        try {
            auto decoded = decode_event(meta.abi, ev->topics, ev->data);
            uint32_t occ = occurrences[decoded.event]++;
            t.logs.push_back({decoded.event, occ, std::move(decoded.params)});
        } catch (const Error& e) {
            t.warnings.emplace_back(e.what());
        }
    }

    // Record points: whole call, plus each child call leaving the contract.
    std::vector<std::pair<RecordPoint, size_t>> points{{RecordPoint::pre_call(), node.enter_seq},
                                                       {RecordPoint::post_call(), node.exit_seq}};
    for (const TxNode* c : node.calls()) {
        if (c->receiver == meta.address) continue;
        points.emplace_back(RecordPoint::pre_sub(t.subcalls), c->enter_seq);
        points.emplace_back(RecordPoint::post_sub(t.subcalls), c->exit_seq + 1);
        ++t.subcalls;
    }
    for (const auto& [p, _] : points) t.snapshots[p];

    auto keys = candidate_keys(node, meta.address, t.params, t.logs, cft.header.key_hints);
    SlotResolver resolver{meta.layout, keys};
    detail::StorageTimeline timeline{cft, meta.address};
    for (const Word& slot : detail::subtree_slots(cft, node, meta.address)) {
        auto locations = resolver.locate(slot);
        for (const auto& [point, seq] : points) {
            Snapshot& snap = t.snapshots[point];
            Word raw = timeline.value_at(slot, seq);
            if (locations.empty()) {
                snap.vars[{std::string{kAnonymousSlotLabel}, {slot}, {}}] = TypedValue::unsigned_int(raw.to_uint(), "bytes32");
                continue;
            }
            for (const auto& loc : locations) {
                try {
                    StateId id{loc.label, loc.key_path, loc.index ? std::string{} : loc.member};
                    if (loc.length) {
                        snap.arrays[id].length = raw.to_uint();
                    } else if (loc.index) {
                        snap.arrays[id].elements[*loc.index][loc.member] = decode_slot_value(*loc.type, raw, loc.offset);
                    } else {
                        snap.vars[id] = decode_slot_value(*loc.type, raw, loc.offset);
                    }
                } catch (const Error& e) {
                    if (point == RecordPoint::pre_call()) t.warnings.emplace_back(e.what());
                }
            }
        }
    }

    for (const auto& b : node.balances) {
        auto it = t.snapshots.find(b.point);
        if (it == t.snapshots.end()) {
            t.warnings.push_back("balance observation at missing point " + to_string(b.point));
            continue;
        }
        it->second.tokens[{b.token, b.holder}] = b.amount;
    }
    return t;
}

/// Every trace of `record` that targets the contract, in pre-order.
inline std::vector<ExecutionTrace> extract_traces(const RawTxRecord& record, const ContractMeta& meta) {
    CallFlowTree cft = build_cft(record);
    std::vector<ExecutionTrace> out;
    auto nodes = select_relevant_subtrees(cft, meta.address);
    for (size_t i = 0; i < nodes.size(); ++i) out.push_back(extract_trace(cft, *nodes[i], meta, static_cast<uint32_t>(i)));
    return out;
}

// ---------------------------------------------------------------------------
// trace file serialization

namespace detail {

    inline nlohmann::json words_to_json(const std::vector<Word>& ws) {
        auto a = nlohmann::json::array();
        for (const auto& w : ws) a.push_back(w.hex());
        return a;
    }

    inline std::vector<Word> words_from_json(const nlohmann::json& j) {
        std::vector<Word> out;
        for (const auto& w : j) out.push_back(Word::from_hex(w.get<std::string>()));
        return out;
    }

    inline nlohmann::json named_to_json(const NamedValues& values) {
        auto a = nlohmann::json::array();
        for (const auto& [n, v] : values) a.push_back({{"name", n}, {"value", to_json(v)}});
        return a;
    }

    inline NamedValues named_from_json(const nlohmann::json& j) {
        NamedValues out;
        for (const auto& e : j) out.emplace_back(e.at("name").get<std::string>(), typed_value_from_json(e.at("value")));
        return out;
    }

}  // namespace detail

inline nlohmann::json to_json(const ExecutionTrace& t) {
    using nlohmann::json;
    json snaps = json::object();
    for (const auto& [point, s] : t.snapshots) {
        auto vars = json::array();
        for (const auto& [id, v] : s.vars)
            vars.push_back({{"label", id.label}, {"keys", detail::words_to_json(id.keys)}, {"member", id.member}, {"value", to_json(v)}});
        auto arrays = json::array();
        for (const auto& [id, a] : s.arrays) {
            auto elems = json::array();
            for (const auto& [idx, members] : a.elements)
                for (const auto& [m, v] : members) elems.push_back({{"index", idx}, {"member", m}, {"value", to_json(v)}});
            json aj{{"label", id.label}, {"keys", detail::words_to_json(id.keys)}, {"elements", std::move(elems)}};
            aj["length"] = a.length ? json(to_decimal(*a.length)) : json(nullptr);
            arrays.push_back(std::move(aj));
        }
        auto tokens = json::array();
        for (const auto& [k, amount] : s.tokens)
            tokens.push_back({{"token", k.first.hex()}, {"holder", k.second.hex()}, {"amount", to_decimal(amount)}});
        snaps[to_string(point)] = {{"state", std::move(vars)}, {"arrays", std::move(arrays)}, {"tokens", std::move(tokens)}};
    }
    auto logs = json::array();
    for (const auto& l : t.logs) logs.push_back({{"name", l.name}, {"occurrence", l.occurrence}, {"params", detail::named_to_json(l.params)}});
    return json{{"schema", 1},
                {"contract", t.contract.hex()},
                {"function", t.function},
                {"selector", selector_hex(t.selector)},
                {"branch", t.branch.hex()},
                {"tx",
                 {{"hash", t.tx.tx_hash.hex()},
                  {"sender", t.tx.sender.hex()},
                  {"receiver", t.tx.receiver.hex()},
                  {"block", t.tx.block},
                  {"timestamp", t.tx.timestamp},
                  {"value", to_decimal(t.tx.value)}}},
                {"params", detail::named_to_json(t.params)},
                {"logs", std::move(logs)},
                {"snapshots", std::move(snaps)},
                {"subcalls", t.subcalls},
                {"reverted", t.reverted},
                {"subtree", t.subtree},
                {"warnings", t.warnings}};
}

inline ExecutionTrace execution_trace_from_json(const nlohmann::json& j) {
    if (j.value("schema", 0) != 1) throw Error(ErrorCode::kSchemaUnknown, "trace schema " + j.value("schema", nlohmann::json{}).dump());
    ExecutionTrace t;
    try {
        t.contract = Word::from_hex(j.at("contract").get<std::string>());
        t.function = j.at("function").get<std::string>();
        t.selector = static_cast<uint32_t>(Word::from_hex(j.at("selector").get<std::string>()).to_uint());
        t.branch = Word::from_hex(j.at("branch").get<std::string>());
        const auto& tx = j.at("tx");
        t.tx = {Word::from_hex(tx.at("hash").get<std::string>()), Word::from_hex(tx.at("sender").get<std::string>()),
                Word::from_hex(tx.at("receiver").get<std::string>()), tx.at("block").get<uint64_t>(),
                tx.at("timestamp").get<uint64_t>(), parse_integer(tx.at("value").get<std::string>())};
        t.params = detail::named_from_json(j.at("params"));
        for (const auto& l : j.at("logs"))
            t.logs.push_back({l.at("name").get<std::string>(), l.at("occurrence").get<uint32_t>(), detail::named_from_json(l.at("params"))});
        for (const auto& [name, s] : j.at("snapshots").items()) {
            Snapshot& snap = t.snapshots[parse_record_point(name)];
            for (const auto& v : s.at("state"))
                snap.vars[{v.at("label").get<std::string>(), detail::words_from_json(v.at("keys")), v.at("member").get<std::string>()}] =
                    typed_value_from_json(v.at("value"));
            for (const auto& a : s.at("arrays")) {
                ArrayObs& obs = snap.arrays[{a.at("label").get<std::string>(), detail::words_from_json(a.at("keys")), {}}];
                if (!a.at("length").is_null()) obs.length = parse_integer(a.at("length").get<std::string>());
                for (const auto& e : a.at("elements"))
                    obs.elements[e.at("index").get<uint64_t>()][e.at("member").get<std::string>()] = typed_value_from_json(e.at("value"));
            }
            for (const auto& tk : s.at("tokens"))
                snap.tokens[{Word::from_hex(tk.at("token").get<std::string>()), Word::from_hex(tk.at("holder").get<std::string>())}] =
                    parse_integer(tk.at("amount").get<std::string>());
        }
        t.subcalls = j.at("subcalls").get<uint32_t>();
        t.reverted = j.at("reverted").get<bool>();
        t.subtree = j.at("subtree").get<uint32_t>();
        t.warnings = j.at("warnings").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kMalformedArtifact, e.what());
    }
    return t;
}

}  // namespace txoracle
