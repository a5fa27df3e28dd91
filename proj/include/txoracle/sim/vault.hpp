// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "machine.hpp"

namespace txoracle::sim {

/// Deposit contract with a RUNE fast path (tokens go straight to the vault)
/// and a generic path (tokens go to the contract), plus ETH credits.
/// Storage: RUNE @0, credits @1.
class DepositVault : public Machine {
  public:
    static constexpr uint64_t kRuneSlot = 0;
    static constexpr uint64_t kCreditsSlot = 1;

    static constexpr uint64_t kRuneBranch = 0x2c4;
    static constexpr uint64_t kOtherBranch = 0x2f1;
    static constexpr uint64_t kWithdrawOk = 0x35a;
    static constexpr uint64_t kWithdrawLow = 0x372;

    DepositVault(uint64_t seed, size_t population, bool rune_only = false)
        : rng_{seed},
          address_{sim_address("vault/contract")},
          rune_{sim_address("vault/token/RUNE")},
          rune_only_{rune_only} {
        tokens_ = {rune_, sim_address("vault/token/TKA"), sim_address("vault/token/TKB")};
        for (size_t i = 0; i < 3; ++i) vaults_.push_back(sim_address("vault/asgard" + std::to_string(i)));
        for (size_t i = 0; i < population; ++i) {
            users_.push_back(sim_address("vault/user" + std::to_string(i)));
            for (const auto& t : tokens_) mint(world_, t, users_.back(), rng_.between(pow10(24), pow10(25)));
            world_.eth[users_.back()] = rng_.between(pow10(23), pow10(24));
        }
        world_.store(address_, Word::from_u64(kRuneSlot), rune_);
        world_.eth[address_] = 0;
    }

    [[nodiscard]] Word contract() const override { return address_; }

    [[nodiscard]] std::string abi_json() const override {
        nlohmann::json abi = nlohmann::json::array({
            abi_function("deposit", {{"vault", "address"}, {"ast", "address"}, {"amt", "uint256"}}),
            abi_function("depositEth", {}, "payable"),
            abi_function("withdraw", {{"amt", "uint256"}}),
            abi_event("Deposit", {{"vault", "address"}, {"ast", "address"}, {"safeAmt", "uint256"}}, {true, false, false}),
        });
        return abi.dump();
    }

    [[nodiscard]] std::string layout_json() const override {
        nlohmann::json storage = nlohmann::json::array({
            storage_entry("Example", "RUNE", 0, "t_address"),
            storage_entry("Example", "credits", 1, "t_mapping(t_address,t_uint256)"),
        });
        nlohmann::json types{
            {"t_address", value_type("address", 20)},
            {"t_uint256", value_type("uint256", 32)},
            {"t_mapping(t_address,t_uint256)", mapping_type("mapping(address => uint256)", "t_address", "t_uint256")},
        };
        return nlohmann::json{{"storage", storage}, {"types", types}}.dump();
    }

    [[nodiscard]] const World& world() const { return world_; }
    [[nodiscard]] Word rune() const { return rune_; }

    RawTxRecord next(TxHeader header) override {
        last_anomalous_ = false;
        hint(header);
        uint64_t r = rng_.below(100);
        if (r < 60 || rune_only_) return deposit(std::move(header));
        if (r < 80) return deposit_eth(std::move(header));
        std::vector<Word> funded;
        for (const auto& u : users_)
            if (credits(u) > 0) funded.push_back(u);
        if (funded.empty()) return deposit_eth(std::move(header));
        const Word& u = rng_.pick(funded);
        return withdraw(std::move(header), u, u, rng_.between(1, credits(u)));
    }

    RawTxRecord attack(AttackScript script, TxHeader header) override {
        hint(header);
        if (script == AttackScript::kFakeDeposit) {
            Word attacker = sim_address("vault/attacker");
            Word fake = sim_address("vault/token/FAKE");
            header.key_hints.push_back(fake);
            return deposit(std::move(header), attacker, rng_.pick(vaults_), fake, rng_.between(pow10(20), pow10(21)), false);
        }
        if (script == AttackScript::kReentrantDrain) {
            Word attacker = sim_address("vault/attacker");
            Word agent = sim_address("vault/attacker-contract");
            BigInt amt = world_.eth[address_] / 4;
            if (amt == 0) {
                amt = 1;
                world_.eth[address_] = 2;
            }
            world_.store(address_, credit_slot(agent), Word::from_uint(credits(agent) + amt));
            header.key_hints.push_back(agent);
            header.origin = attacker;
            TxBuilder tx{world_, std::move(header)};
            uint32_t sel = selector_of("attack()");
            tx.enter(attacker, agent, Bytes{uint8_t(sel >> 24), uint8_t(sel >> 16), uint8_t(sel >> 8), uint8_t(sel)});
            withdraw_call(tx, agent, amt, true);
            tx.exit();
            return tx.finish();
        }
        return Machine::attack(script, std::move(header));
    }

  private:
    void hint(TxHeader& header) const {
        header.key_hints = users_;
        header.key_hints.insert(header.key_hints.end(), vaults_.begin(), vaults_.end());
        header.key_hints.insert(header.key_hints.end(), tokens_.begin(), tokens_.end());
    }

    static Word credit_slot(const Word& user) { return mapping_slot(user, Word::from_u64(kCreditsSlot)); }
    BigInt credits(const Word& user) const { return world_.load(address_, credit_slot(user)).to_uint(); }

    const AbiIndex& abi() const {
        static const AbiIndex index = parse_abi(abi_json());
        return index;
    }

    RawTxRecord deposit(TxHeader header) {
        Word user = rng_.pick(users_);
        Word vault = rng_.pick(vaults_);
        Word ast = rune_only_ || rng_.percent(50) ? rune_ : tokens_[1 + rng_.below(2)];
        BigInt amt = rng_.between(1, world_.balance(ast, user) / 8);
        return deposit(std::move(header), user, vault, ast, amt, true);
    }

    RawTxRecord deposit(TxHeader header, const Word& user, const Word& vault, const Word& ast, const BigInt& amt, bool moves) {
        header.origin = user;
        TxBuilder tx{world_, std::move(header)};
        tx.enter(user, address_,
                 encode_call(*abi().function_by_name("deposit"),
                             {TypedValue::address(vault), TypedValue::address(ast), TypedValue::unsigned_int(amt)}));
        const std::vector<Word> watched{user, vault, address_};
        for (const auto& h : watched) tx.observe(ast, h, RecordPoint::pre_call());
        Word rune = tx.sload(address_, Word::from_u64(kRuneSlot));
        bool branch1 = ast == rune;
        tx.jumpi(branch1 ? kRuneBranch : kOtherBranch);
        for (const auto& h : watched) tx.observe(ast, h, RecordPoint::pre_sub(0));
        token_transfer_from(tx, address_, ast, user, branch1 ? vault : address_, amt, moves);
        for (const auto& h : watched) tx.observe(ast, h, RecordPoint::post_sub(0));
        tx.emit(address_, encode_event(*abi().event_by_name("Deposit"),
                                       {TypedValue::address(vault), TypedValue::address(ast), TypedValue::unsigned_int(amt)}));
        for (const auto& h : watched) tx.observe(ast, h, RecordPoint::post_call());
        tx.exit();
        return tx.finish();
    }

    RawTxRecord deposit_eth(TxHeader header) {
        Word user = rng_.pick(users_);
        BigInt value = rng_.between(1, world_.eth[user] / 8);
        header.origin = user;
        TxBuilder tx{world_, std::move(header)};
        const Word& eth = ether_marker();
        BigInt user_before = world_.balance(eth, user);
        BigInt this_before = world_.balance(eth, address_);
        tx.enter(user, address_, encode_call(*abi().function_by_name("depositEth"), {}), value);
        tx.observe_value(eth, user, RecordPoint::pre_call(), user_before);
        tx.observe_value(eth, address_, RecordPoint::pre_call(), this_before);
        BigInt c = tx.load_uint(address_, credit_slot(user));
        tx.store_uint(address_, credit_slot(user), c + value);
        tx.observe(eth, user, RecordPoint::post_call());
        tx.observe(eth, address_, RecordPoint::post_call());
        tx.exit();
        return tx.finish();
    }

    RawTxRecord withdraw(TxHeader header, const Word& user, const Word& origin, const BigInt& amt) {
        header.origin = origin;
        TxBuilder tx{world_, std::move(header)};
        withdraw_call(tx, user, amt, false);
        return tx.finish();
    }

    /// The cached credit is written back after the ETH transfer, so a
    /// re-entrant receiver can withdraw twice.
    void withdraw_call(TxBuilder& tx, const Word& user, const BigInt& amt, bool reenter) {
        const Word& eth = ether_marker();
        tx.enter(user, address_, encode_call(*abi().function_by_name("withdraw"), {TypedValue::unsigned_int(amt)}));
        tx.observe(eth, user, RecordPoint::pre_call());
        tx.observe(eth, address_, RecordPoint::pre_call());
        BigInt c = tx.load_uint(address_, credit_slot(user));
        if (c < amt) {
            tx.jumpi(kWithdrawLow);
        } else {
            tx.jumpi(kWithdrawOk);
            tx.observe(eth, user, RecordPoint::pre_sub(0));
            tx.observe(eth, address_, RecordPoint::pre_sub(0));
            tx.enter(address_, user, {}, amt);
            if (reenter) withdraw_call(tx, user, amt, false);
            tx.exit();
            tx.observe(eth, user, RecordPoint::post_sub(0));
            tx.observe(eth, address_, RecordPoint::post_sub(0));
            tx.store_uint(address_, credit_slot(user), c - amt);
        }
        tx.observe(eth, user, RecordPoint::post_call());
        tx.observe(eth, address_, RecordPoint::post_call());
        tx.exit();
    }

    Rng rng_;
    World world_;
    Word address_;
    Word rune_;
    bool rune_only_;
    std::vector<Word> tokens_;
    std::vector<Word> vaults_;
    std::vector<Word> users_;
};

}  // namespace txoracle::sim
