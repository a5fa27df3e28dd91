// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "machine.hpp"

namespace txoracle::sim {

/// Access-controlled contract. Storage: address[] whitelist @0, counter @1,
/// Limit{addr, limit}[] limits @2. Both entry points scan their list until
/// the caller is found.
class Whitelist : public Machine {
  public:
    static constexpr uint64_t kWhitelistSlot = 0;
    static constexpr uint64_t kCounterSlot = 1;
    static constexpr uint64_t kLimitsSlot = 2;

    static constexpr uint64_t kScan = 0x410;
    static constexpr uint64_t kScanNext = 0x42e;
    static constexpr uint64_t kScanFound = 0x43b;
    static constexpr uint64_t kGuardPass = 0x451;
    static constexpr uint64_t kLimitScan = 0x4a0;
    static constexpr uint64_t kLimitNext = 0x4b6;
    static constexpr uint64_t kLimitFound = 0x4c3;
    static constexpr uint64_t kWithinLimit = 0x4d9;

    Whitelist(uint64_t seed, size_t population) : rng_{seed}, address_{sim_address("whitelist/contract")} {
        if (population < 4) throw Error(ErrorCode::kInvalidSpec, "whitelist scenario needs at least 4 accounts");
        for (size_t i = 0; i < population; ++i) users_.push_back(sim_address("whitelist/user" + std::to_string(i)));
        members_.assign(users_.begin(), users_.begin() + 4);
        limited_.assign(users_.end() - 4, users_.end());

        Word list = Word::from_u64(kWhitelistSlot);
        world_.store(address_, list, Word::from_u64(members_.size()));
        for (size_t i = 0; i < members_.size(); ++i) world_.store(address_, slot_add(array_data_slot(list), i), members_[i]);
        Word limits = Word::from_u64(kLimitsSlot);
        world_.store(address_, limits, Word::from_u64(limited_.size()));
        for (size_t i = 0; i < limited_.size(); ++i) {
            world_.store(address_, limit_slot(i, 0), limited_[i]);
            world_.store(address_, limit_slot(i, 1), Word::from_uint(rng_.between(pow10(24), pow10(25))));
        }
    }

    [[nodiscard]] Word contract() const override { return address_; }

    [[nodiscard]] std::string abi_json() const override {
        nlohmann::json abi = nlohmann::json::array({
            abi_function("execute", {{"amount", "uint256"}}),
            abi_function("spend", {{"amount", "uint256"}}),
            abi_event("Executed", {{"caller", "address"}, {"amount", "uint256"}}, {true, false}),
            abi_event("Spent", {{"caller", "address"}, {"amount", "uint256"}}, {true, false}),
        });
        return abi.dump();
    }

    [[nodiscard]] std::string layout_json() const override {
        const std::string limit_type = "t_struct(Limit)14_storage";
        nlohmann::json storage = nlohmann::json::array({
            storage_entry("Whitelist", "whitelist", 0, "t_array(t_address)dyn_storage"),
            storage_entry("Whitelist", "counter", 1, "t_uint256"),
            storage_entry("Whitelist", "limits", 2, "t_array(" + limit_type + ")dyn_storage"),
        });
        nlohmann::json limit{{"encoding", "inplace"},
                             {"label", "struct Whitelist.Limit"},
                             {"numberOfBytes", "64"},
                             {"members", nlohmann::json::array({storage_entry("Whitelist", "addr", 0, "t_address"),
                                                                storage_entry("Whitelist", "limit", 1, "t_uint256")})}};
        nlohmann::json types{
            {"t_address", value_type("address", 20)},
            {"t_uint256", value_type("uint256", 32)},
            {"t_array(t_address)dyn_storage", array_type("address[]", "t_address")},
            {limit_type, limit},
            {"t_array(" + limit_type + ")dyn_storage", array_type("struct Whitelist.Limit[]", limit_type)},
        };
        return nlohmann::json{{"storage", storage}, {"types", types}}.dump();
    }

    [[nodiscard]] const std::vector<Word>& members() const { return members_; }

    RawTxRecord next(TxHeader header) override {
        last_anomalous_ = false;
        header.key_hints = users_;
        if (rng_.percent(70)) return execute(std::move(header), rng_.pick(members_), false);
        return spend(std::move(header), rng_.pick(limited_));
    }

    RawTxRecord attack(AttackScript script, TxHeader header) override {
        if (script != AttackScript::kUnauthorizedCall) return Machine::attack(script, std::move(header));
        Word attacker = sim_address("whitelist/attacker");
        header.key_hints = users_;
        header.key_hints.push_back(attacker);
        return execute(std::move(header), attacker, true);
    }

  private:
    Word limit_slot(size_t index, uint64_t member) const {
        return slot_add(array_data_slot(Word::from_u64(kLimitsSlot)), 2 * index + member);
    }

    const AbiIndex& abi() const {
        static const AbiIndex index = parse_abi(abi_json());
        return index;
    }

    /// The guard after the scan is missing on the path where nothing matched.
    RawTxRecord execute(TxHeader header, const Word& caller, bool skip_guard) {
        BigInt amount = rng_.between(1, pow10(20));
        header.origin = caller;
        TxBuilder tx{world_, std::move(header)};
        tx.enter(caller, address_, encode_call(*abi().function_by_name("execute"), {TypedValue::unsigned_int(amount)}));
        Word list = Word::from_u64(kWhitelistSlot);
        uint64_t n = static_cast<uint64_t>(tx.load_uint(address_, list));
        bool found = false;
        for (uint64_t i = 0; i < n && !found; ++i) {
            tx.jumpi(kScan);
            found = tx.sload(address_, slot_add(array_data_slot(list), i)) == caller;
            tx.jumpi(found ? kScanFound : kScanNext);
        }
        if (!found && !skip_guard) throw Error(ErrorCode::kInvalidSpec, "caller not whitelisted");
        if (found) tx.jumpi(kGuardPass);
        BigInt c = tx.load_uint(address_, Word::from_u64(kCounterSlot));
        tx.store_uint(address_, Word::from_u64(kCounterSlot), c + amount);
        tx.emit(address_, encode_event(*abi().event_by_name("Executed"), {TypedValue::address(caller), TypedValue::unsigned_int(amount)}));
        tx.exit();
        return tx.finish();
    }

    RawTxRecord spend(TxHeader header, const Word& caller) {
        BigInt amount = rng_.between(1, pow10(20));
        header.origin = caller;
        TxBuilder tx{world_, std::move(header)};
        tx.enter(caller, address_, encode_call(*abi().function_by_name("spend"), {TypedValue::unsigned_int(amount)}));
        uint64_t n = static_cast<uint64_t>(tx.load_uint(address_, Word::from_u64(kLimitsSlot)));
        uint64_t at = n;
        for (uint64_t i = 0; i < n && at == n; ++i) {
            tx.jumpi(kLimitScan);
            bool hit = tx.sload(address_, limit_slot(i, 0)) == caller;
            tx.jumpi(hit ? kLimitFound : kLimitNext);
            if (hit) at = i;
        }
        BigInt lim = tx.load_uint(address_, limit_slot(at, 1));
        tx.jumpi(kWithinLimit);
        tx.store_uint(address_, limit_slot(at, 1), lim - amount);
        tx.emit(address_, encode_event(*abi().event_by_name("Spent"), {TypedValue::address(caller), TypedValue::unsigned_int(amount)}));
        tx.exit();
        return tx.finish();
    }

    Rng rng_;
    World world_;
    Word address_;
    std::vector<Word> users_;
    std::vector<Word> members_;
    std::vector<Word> limited_;
};

}  // namespace txoracle::sim
