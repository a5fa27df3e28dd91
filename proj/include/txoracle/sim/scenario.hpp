// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "erc20.hpp"
#include "vault.hpp"
#include "whitelist.hpp"

namespace txoracle::sim {

enum class MachineKind { kErc20, kDepositVault, kWhitelist };

inline std::string_view to_string(MachineKind m) {
    switch (m) {
        case MachineKind::kErc20: return "erc20";
        case MachineKind::kDepositVault: return "vault";
        case MachineKind::kWhitelist: return "whitelist";
    }
    return "?";
}

inline MachineKind parse_machine(std::string_view s) {
    for (auto m : {MachineKind::kErc20, MachineKind::kDepositVault, MachineKind::kWhitelist})
        if (to_string(m) == s) return m;
    throw Error(ErrorCode::kInvalidSpec, "unknown scenario " + std::string{s});
}

struct ScenarioSpec {
    MachineKind machine{MachineKind::kErc20};
    size_t population{6};
    size_t tx_count{0};
    size_t holdout{0};  // benign transactions generated after the mining corpus
    uint64_t seed{1};
    Rational anomaly_rate{0};
    std::optional<AttackScript> attack;
    bool rune_only{false};

    void validate() const {
        if (population < 2) throw Error(ErrorCode::kInvalidSpec, "population must be at least 2");
        if (anomaly_rate < 0 || anomaly_rate >= 1) throw Error(ErrorCode::kInvalidSpec, "anomaly rate must be in [0,1)");
        if (anomaly_rate > 0 && machine != MachineKind::kErc20)
            throw Error(ErrorCode::kInvalidSpec, "anomaly injection is only defined for erc20");
        if (rune_only && machine != MachineKind::kDepositVault)
            throw Error(ErrorCode::kInvalidSpec, "rune-only applies to the vault scenario");
    }
};

/// Every k-th successful transfer is perturbed, where k = ceil(1 / rate).
inline size_t anomaly_spacing(const Rational& rate) {
    if (rate <= 0) return 0;
    BigInt num = boost::multiprecision::numerator(rate);
    BigInt den = boost::multiprecision::denominator(rate);
    return static_cast<size_t>((den + num - 1) / num);
}

inline std::unique_ptr<Machine> make_machine(const ScenarioSpec& spec) {
    spec.validate();
    switch (spec.machine) {
        case MachineKind::kErc20:
            return std::make_unique<Erc20>(spec.seed, spec.population, anomaly_spacing(spec.anomaly_rate));
        case MachineKind::kDepositVault: return std::make_unique<DepositVault>(spec.seed, spec.population, spec.rune_only);
        case MachineKind::kWhitelist: return std::make_unique<Whitelist>(spec.seed, spec.population);
    }
    throw Error(ErrorCode::kInvalidSpec, "unknown machine");
}

inline TxHeader sim_header(uint64_t seed, size_t index) {
    TxHeader h;
    h.tx_hash = keccak256("txoracle/tx/" + std::to_string(seed) + "/" + std::to_string(index));
    h.block = 17'000'000 + index;
    h.timestamp = 1'700'000'000 + 12 * index;
    return h;
}

struct Corpus {
    Word contract;
    std::string abi_json;
    std::string layout_json;
    std::vector<RawTxRecord> records;
    std::vector<RawTxRecord> holdout;
    std::optional<RawTxRecord> attack;
    std::vector<size_t> anomalies;  // 0-based positions in records
};

/// Deterministic for a given spec.
inline Corpus gen_corpus(const ScenarioSpec& spec) {
    auto machine = make_machine(spec);
    Corpus c;
    c.contract = machine->contract();
    c.abi_json = machine->abi_json();
    c.layout_json = machine->layout_json();
    size_t total = spec.tx_count + spec.holdout;
    for (size_t i = 0; i < total; ++i) {
        auto rec = machine->next(sim_header(spec.seed, i));
        if (i < spec.tx_count) {
            if (machine->last_anomalous()) c.anomalies.push_back(i);
            c.records.push_back(std::move(rec));
        } else {
            c.holdout.push_back(std::move(rec));
        }
    }
    if (spec.attack) c.attack = machine->attack(*spec.attack, sim_header(spec.seed, total));
    return c;
}

/// The attack transaction that follows the scenario's benign history.
inline RawTxRecord inject_attack(ScenarioSpec spec, AttackScript script) {
    spec.attack = script;
    return *gen_corpus(spec).attack;
}

inline nlohmann::json to_json(const ScenarioSpec& s) {
    nlohmann::json j{{"scenario", to_string(s.machine)},
                     {"population", s.population},
                     {"txs", s.tx_count},
                     {"holdout", s.holdout},
                     {"seed", s.seed},
                     {"anomalyRate", s.anomaly_rate.str()},
                     {"runeOnly", s.rune_only}};
    j["attack"] = s.attack ? nlohmann::json(std::string{to_string(*s.attack)}) : nlohmann::json(nullptr);
    return j;
}

}  // namespace txoracle::sim
