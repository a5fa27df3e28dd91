// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "machine.hpp"

namespace txoracle::sim {

/// Token with totalSupply @0, balances @1, allowance @2. Every call runs a
/// supply audit that reads totalSupply and each holder balance, so the full
/// balance map is visible in each trace.
class Erc20 : public Machine {
  public:
    static constexpr uint64_t kTotalSupplySlot = 0;
    static constexpr uint64_t kAllowanceSlot = 2;

    // jump destinations
    static constexpr uint64_t kTransferMove = 0x0a1;
    static constexpr uint64_t kTransferSkip = 0x0a9;
    static constexpr uint64_t kFromBalanceOk = 0x1b2;
    static constexpr uint64_t kFromBalanceLow = 0x1c8;
    static constexpr uint64_t kAllowanceOk = 0x1d4;
    static constexpr uint64_t kAllowanceLow = 0x1e0;

    /// anomaly_every > 0 makes every anomaly_every-th successful transfer declare
    /// an amount off by one from what it moves. Balances follow the clean run.
    Erc20(uint64_t seed, size_t population, size_t anomaly_every = 0)
        : rng_{seed}, address_{sim_address("erc20/token")}, anomaly_every_{anomaly_every} {
        BigInt supply = 0;
        for (size_t i = 0; i < population; ++i) {
            holders_.push_back(sim_address("erc20/holder" + std::to_string(i)));
            BigInt b = rng_.between(pow10(21), pow10(22));
            mint(world_, address_, holders_.back(), b);
            supply += b;
        }
        world_.store(address_, Word::from_u64(kTotalSupplySlot), Word::from_uint(supply));
    }

    [[nodiscard]] Word contract() const override { return address_; }
    [[nodiscard]] std::string abi_json() const override { return token_abi().dump(); }

    [[nodiscard]] std::string layout_json() const override {
        nlohmann::json storage = nlohmann::json::array({
            storage_entry("ERC20Token", "totalSupply", 0, "t_uint256"),
            storage_entry("ERC20Token", "balances", 1, "t_mapping(t_address,t_uint256)"),
            storage_entry("ERC20Token", "allowance", 2, "t_mapping(t_address,t_mapping(t_address,t_uint256))"),
        });
        nlohmann::json types{
            {"t_address", value_type("address", 20)},
            {"t_uint256", value_type("uint256", 32)},
            {"t_mapping(t_address,t_uint256)", mapping_type("mapping(address => uint256)", "t_address", "t_uint256")},
            {"t_mapping(t_address,t_mapping(t_address,t_uint256))",
             mapping_type("mapping(address => mapping(address => uint256))", "t_address", "t_mapping(t_address,t_uint256)")},
        };
        return nlohmann::json{{"storage", storage}, {"types", types}}.dump();
    }

    [[nodiscard]] const std::vector<Word>& holders() const { return holders_; }
    [[nodiscard]] const World& world() const { return world_; }

    RawTxRecord next(TxHeader header) override {
        last_anomalous_ = false;
        header.key_hints = holders_;
        uint64_t r = rng_.below(100);
        if (r < 25) return approve(std::move(header));
        if (r < 50) {
            if (auto rec = transfer_from(header)) return std::move(*rec);
        }
        return transfer(std::move(header));
    }

  private:
    Word allowance_slot(const Word& owner, const Word& spender) const {
        return mapping_slot(spender, mapping_slot(owner, Word::from_u64(kAllowanceSlot)));
    }

    void audit(TxBuilder& tx) {
        tx.sload(address_, Word::from_u64(kTotalSupplySlot));
        for (const auto& h : holders_) tx.sload(address_, balance_slot(h));
    }

    Word other_holder(const Word& not_this) {
        for (;;) {
            const Word& h = rng_.pick(holders_);
            if (h != not_this) return h;
        }
    }

    RawTxRecord transfer(TxHeader header) {
        Word sender = rng_.pick(holders_);
        Word to = other_holder(sender);
        BigInt bal = world_.balance(address_, sender);
        bool skip = rng_.percent(15) || bal < 2;
        bool anomaly = !skip && anomaly_every_ > 0 && (successes_ + 1) % anomaly_every_ == 0;
        BigInt moved = skip ? bal + rng_.between(1, pow10(21)) : rng_.between(1, bal);
        BigInt amt = moved;
        if (anomaly) amt += moved > 1 ? -1 : 1;

        header.origin = sender;
        TxBuilder tx{world_, std::move(header)};
        const auto& abi = token_abi_index();
        tx.enter(sender, address_,
                 encode_call(*abi.function_by_name("transfer"), {TypedValue::address(to), TypedValue::unsigned_int(amt)}));
        audit(tx);
        BigInt sb = tx.load_uint(address_, balance_slot(sender));
        if (sb >= amt) {
            tx.jumpi(kTransferMove);
            tx.store_uint(address_, balance_slot(sender), sb - moved);
            BigInt tb = tx.load_uint(address_, balance_slot(to));
            tx.store_uint(address_, balance_slot(to), tb + moved);
            tx.emit(address_, encode_event(*abi.event_by_name("Transfer"), {TypedValue::address(sender), TypedValue::address(to),
                                                                            TypedValue::unsigned_int(amt)}));
            ++successes_;
            last_anomalous_ = anomaly;
        } else {
            tx.jumpi(kTransferSkip);
        }
        tx.exit();
        return tx.finish();
    }

    RawTxRecord approve(TxHeader header) {
        Word sender = rng_.pick(holders_);
        Word spender = other_holder(sender);
        BigInt amt = rng_.between(1, pow10(22));

        header.origin = sender;
        TxBuilder tx{world_, std::move(header)};
        const auto& abi = token_abi_index();
        tx.enter(sender, address_,
                 encode_call(*abi.function_by_name("approve"), {TypedValue::address(spender), TypedValue::unsigned_int(amt)}));
        audit(tx);
        tx.store_uint(address_, allowance_slot(sender, spender), amt);
        tx.emit(address_, encode_event(*abi.event_by_name("Approval"), {TypedValue::address(sender), TypedValue::address(spender),
                                                                        TypedValue::unsigned_int(amt)}));
        tx.exit();
        return tx.finish();
    }

    std::optional<RawTxRecord> transfer_from(TxHeader& header) {
        std::vector<std::pair<Word, Word>> pairs;  // (owner, spender)
        for (const auto& o : holders_)
            for (const auto& s : holders_)
                if (o != s && world_.load(address_, allowance_slot(o, s)).to_uint() > 0) pairs.emplace_back(o, s);
        if (pairs.empty()) return std::nullopt;
        auto [from, spender] = rng_.pick(pairs);
        Word to = other_holder(from);
        BigInt bal = world_.balance(address_, from);
        BigInt allowed = world_.load(address_, allowance_slot(from, spender)).to_uint();
        BigInt cap = bal < allowed ? bal : allowed;
        uint64_t mode = rng_.below(100);
        BigInt amt;
        if (mode < 10 || cap == 0) amt = bal + rng_.between(1, pow10(21));
        else if (mode < 20) amt = allowed + rng_.between(1, pow10(21));
        else amt = rng_.between(1, cap);

        header.origin = spender;
        header.key_hints = holders_;
        TxBuilder tx{world_, std::move(header)};
        const auto& abi = token_abi_index();
        tx.enter(spender, address_,
                 encode_call(*abi.function_by_name("transferFrom"),
                             {TypedValue::address(from), TypedValue::address(to), TypedValue::unsigned_int(amt)}));
        audit(tx);
        BigInt fb = tx.load_uint(address_, balance_slot(from));
        if (fb < amt) {
            tx.jumpi(kFromBalanceLow);
        } else {
            tx.jumpi(kFromBalanceOk);
            BigInt al = tx.load_uint(address_, allowance_slot(from, spender));
            if (al < amt) {
                tx.jumpi(kAllowanceLow);
            } else {
                tx.jumpi(kAllowanceOk);
                tx.store_uint(address_, allowance_slot(from, spender), al - amt);
                tx.store_uint(address_, balance_slot(from), fb - amt);
                BigInt tb = tx.load_uint(address_, balance_slot(to));
                tx.store_uint(address_, balance_slot(to), tb + amt);
                tx.emit(address_, encode_event(*abi.event_by_name("Transfer"), {TypedValue::address(from), TypedValue::address(to),
                                                                                TypedValue::unsigned_int(amt)}));
            }
        }
        tx.exit();
        return tx.finish();
    }

    Rng rng_;
    World world_;
    Word address_;
    std::vector<Word> holders_;
    size_t anomaly_every_;
    size_t successes_{0};
};

}  // namespace txoracle::sim
