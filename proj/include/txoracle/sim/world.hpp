// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "../abi.hpp"
#include "../keccak.hpp"
#include "../raw_record.hpp"

namespace txoracle::sim {

/// Deterministic address for a named simulator actor.
inline Word sim_address(std::string_view tag) {
    Word h = keccak256("txoracle/" + std::string{tag});
    Word a;
    std::copy(h.bytes.begin() + 12, h.bytes.end(), a.bytes.begin() + 12);
    return a;
}

/// mt19937_64 with explicit reductions so streams match across standard libraries.
class Rng {
  public:
    explicit Rng(uint64_t seed) : engine_{seed} {}

    uint64_t next() { return engine_(); }
    uint64_t below(uint64_t n) { return n == 0 ? 0 : engine_() % n; }
    bool percent(unsigned p) { return below(100) < p; }

    /// Uniform-ish value in [lo, hi].
    BigInt between(const BigInt& lo, const BigInt& hi) {
        if (hi <= lo) return lo;
        BigInt span = hi - lo + 1;
        BigInt r = 0;
        for (int i = 0; i < 5; ++i) r = (r << 64) | BigInt{engine_()};
        return lo + r % span;
    }

    template <class T>
    const T& pick(const std::vector<T>& v) {
        return v.at(below(v.size()));
    }

  private:
    std::mt19937_64 engine_;
};

inline BigInt pow10(unsigned n) {
    BigInt v = 1;
    for (unsigned i = 0; i < n; ++i) v *= 10;
    return v;
}

inline constexpr uint64_t kTokenBalanceSlot = 1;

/// Storage of every simulated contract plus ETH balances.
struct World {
    std::map<Word, std::map<Word, Word>> storage;
    std::map<Word, BigInt> eth;

    [[nodiscard]] Word load(const Word& contract, const Word& slot) const {
        auto c = storage.find(contract);
        if (c == storage.end()) return {};
        auto s = c->second.find(slot);
        return s == c->second.end() ? Word{} : s->second;
    }

    void store(const Word& contract, const Word& slot, const Word& value) { storage[contract][slot] = value; }

    /// ERC20-style balance (mapping at slot 1) or ETH for ether_marker().
    [[nodiscard]] BigInt balance(const Word& token, const Word& holder) const {
        if (token == ether_marker()) {
            auto it = eth.find(holder);
            return it == eth.end() ? BigInt{0} : it->second;
        }
        return load(token, mapping_slot(holder, Word::from_u64(kTokenBalanceSlot))).to_uint();
    }
};

/// Emits the step stream of one transaction while mutating the world.
class TxBuilder {
  public:
    TxBuilder(World& world, TxHeader header) : world_{world} { record_.header = std::move(header); }

    void enter(const Word& sender, const Word& receiver, Bytes calldata, const BigInt& value = 0) {
        if (value > 0) {
            world_.eth[sender] -= value;
            world_.eth[receiver] += value;
        }
        record_.steps.emplace_back(CallEnter{sender, receiver, std::move(calldata), value});
    }

    void exit(bool success = true) { record_.steps.emplace_back(CallExit{success}); }
    void jumpi(uint64_t pc) { record_.steps.emplace_back(Jumpi{pc}); }

    void emit(const Word& emitter, const EncodedLog& log) { record_.steps.emplace_back(EventEmit{emitter, log.topics, log.data}); }

    Word sload(const Word& contract, const Word& slot) {
        Word v = world_.load(contract, slot);
        record_.steps.emplace_back(StorageAccess{contract, slot, v, v, false});
        return v;
    }

    void sstore(const Word& contract, const Word& slot, const Word& value) {
        Word pre = world_.load(contract, slot);
        world_.store(contract, slot, value);
        record_.steps.emplace_back(StorageAccess{contract, slot, pre, value, true});
    }

    BigInt load_uint(const Word& contract, const Word& slot) { return sload(contract, slot).to_uint(); }
    void store_uint(const Word& contract, const Word& slot, const BigInt& v) { sstore(contract, slot, Word::from_uint(v)); }

    void observe(const Word& token, const Word& holder, RecordPoint point) {
        observe_value(token, holder, point, world_.balance(token, holder));
    }

    void observe_value(const Word& token, const Word& holder, RecordPoint point, const BigInt& amount) {
        record_.steps.emplace_back(BalanceObservation{token, holder, point, amount});
    }

    World& world() { return world_; }
    RawTxRecord finish() { return std::move(record_); }

  private:
    World& world_;
    RawTxRecord record_;
};

// ---------------------------------------------------------------------------
// ABI / layout JSON emitters

inline nlohmann::json abi_params(const std::vector<std::pair<std::string, std::string>>& params,
                                 const std::vector<bool>& indexed = {}) {
    auto a = nlohmann::json::array();
    for (size_t i = 0; i < params.size(); ++i) {
        nlohmann::json p{{"name", params[i].first}, {"type", params[i].second}, {"internalType", params[i].second}};
        if (!indexed.empty()) p["indexed"] = indexed[i];
        a.push_back(std::move(p));
    }
    return a;
}

inline nlohmann::json abi_function(const std::string& name, const std::vector<std::pair<std::string, std::string>>& params,
                                   const std::string& mutability = "nonpayable") {
    return {{"type", "function"},
            {"name", name},
            {"inputs", abi_params(params)},
            {"outputs", nlohmann::json::array()},
            {"stateMutability", mutability}};
}

inline nlohmann::json abi_event(const std::string& name, const std::vector<std::pair<std::string, std::string>>& params,
                                const std::vector<bool>& indexed) {
    return {{"type", "event"}, {"name", name}, {"anonymous", false}, {"inputs", abi_params(params, indexed)}};
}

inline nlohmann::json storage_entry(const std::string& contract, const std::string& label, uint64_t slot,
                                    const std::string& type, unsigned offset = 0) {
    return {{"astId", 0},
            {"contract", contract},
            {"label", label},
            {"offset", offset},
            {"slot", std::to_string(slot)},
            {"type", type}};
}

inline nlohmann::json value_type(const std::string& label, unsigned bytes) {
    return {{"encoding", "inplace"}, {"label", label}, {"numberOfBytes", std::to_string(bytes)}};
}

inline nlohmann::json mapping_type(const std::string& label, const std::string& key, const std::string& value) {
    return {{"encoding", "mapping"}, {"key", key}, {"label", label}, {"numberOfBytes", "32"}, {"value", value}};
}

inline nlohmann::json array_type(const std::string& label, const std::string& base) {
    return {{"encoding", "dynamic_array"}, {"base", base}, {"label", label}, {"numberOfBytes", "32"}};
}

// ---------------------------------------------------------------------------
// ERC20-shaped token helpers shared by the machines

inline const nlohmann::json& token_abi() {
    static const nlohmann::json abi = nlohmann::json::array({
        abi_function("transfer", {{"to", "address"}, {"amt", "uint256"}}),
        abi_function("approve", {{"spender", "address"}, {"amt", "uint256"}}),
        abi_function("transferFrom", {{"from", "address"}, {"to", "address"}, {"amt", "uint256"}}),
        abi_event("Transfer", {{"from", "address"}, {"to", "address"}, {"value", "uint256"}}, {true, true, false}),
        abi_event("Approval", {{"owner", "address"}, {"spender", "address"}, {"value", "uint256"}}, {true, true, false}),
    });
    return abi;
}

inline const AbiIndex& token_abi_index() {
    static const AbiIndex index = parse_abi(token_abi().dump());
    return index;
}

inline Word balance_slot(const Word& holder) { return mapping_slot(holder, Word::from_u64(kTokenBalanceSlot)); }

inline void mint(World& w, const Word& token, const Word& holder, const BigInt& amount) {
    Word slot = balance_slot(holder);
    w.store(token, slot, Word::from_uint(w.load(token, slot).to_uint() + amount));
}

/// `caller` invokes token.transferFrom(from, to, amt); a fake token moves nothing.
inline void token_transfer_from(TxBuilder& tx, const Word& caller, const Word& token, const Word& from, const Word& to,
                                const BigInt& amt, bool moves = true) {
    const auto& abi = token_abi_index();
    const auto& fn = *abi.function_by_name("transferFrom");
    tx.enter(caller, token,
             encode_call(fn, {TypedValue::address(from), TypedValue::address(to), TypedValue::unsigned_int(amt)}));
    if (moves) {
        BigInt fb = tx.load_uint(token, balance_slot(from));
        tx.store_uint(token, balance_slot(from), fb - amt);
        BigInt tb = tx.load_uint(token, balance_slot(to));
        tx.store_uint(token, balance_slot(to), tb + amt);
        tx.emit(token, encode_event(*abi.event_by_name("Transfer"),
                                    {TypedValue::address(from), TypedValue::address(to), TypedValue::unsigned_int(amt)}));
    }
    tx.exit();
}

}  // namespace txoracle::sim
