// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <set>

#include <catch_amalgamated.hpp>

#include "txoracle/checker.hpp"
#include "txoracle/persistence.hpp"
#include "txoracle/sim/scenario.hpp"

using namespace txoracle;

namespace {

sim::ScenarioSpec spec_of(sim::MachineKind m, size_t n, uint64_t seed) {
    sim::ScenarioSpec s;
    s.machine = m;
    s.tx_count = n;
    s.seed = seed;
    return s;
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::kConfig;
}

const auto kMachines = {sim::MachineKind::kErc20, sim::MachineKind::kDepositVault, sim::MachineKind::kWhitelist};

}  // namespace

TEST_CASE("generation is deterministic per seed") {
    for (auto m : kMachines) {
        auto a = sim::gen_corpus(spec_of(m, 50, 61));
        auto b = sim::gen_corpus(spec_of(m, 50, 61));
        auto c = sim::gen_corpus(spec_of(m, 50, 62));
        REQUIRE(save_raw_records(a.records) == save_raw_records(b.records));
        REQUIRE(save_raw_records(a.records) != save_raw_records(c.records));
        REQUIRE(a.abi_json == b.abi_json);
        REQUIRE(a.layout_json == b.layout_json);
    }
}

TEST_CASE("zero transactions give an empty corpus") {
    for (auto m : kMachines) {
        auto c = sim::gen_corpus(spec_of(m, 0, 1));
        REQUIRE(c.records.empty());
        REQUIRE(c.holdout.empty());
        REQUIRE(c.anomalies.empty());
    }
}

TEST_CASE("invalid specs are rejected") {
    auto s = spec_of(sim::MachineKind::kErc20, 5, 1);
    s.population = 1;
    REQUIRE(code_of([&] { sim::gen_corpus(s); }) == ErrorCode::kInvalidSpec);
    s = spec_of(sim::MachineKind::kErc20, 5, 1);
    s.anomaly_rate = 1;
    REQUIRE(code_of([&] { sim::gen_corpus(s); }) == ErrorCode::kInvalidSpec);
    s = spec_of(sim::MachineKind::kWhitelist, 5, 1);
    s.anomaly_rate = Rational{1, 10};
    REQUIRE(code_of([&] { sim::gen_corpus(s); }) == ErrorCode::kInvalidSpec);
    s = spec_of(sim::MachineKind::kErc20, 5, 1);
    s.rune_only = true;
    REQUIRE(code_of([&] { sim::gen_corpus(s); }) == ErrorCode::kInvalidSpec);
    REQUIRE_THROWS_AS(sim::parse_machine("Bank"), Error);
}

TEST_CASE("unsupported attack scripts are rejected") {
    auto s = spec_of(sim::MachineKind::kErc20, 5, 1);
    REQUIRE(code_of([&] { sim::inject_attack(s, sim::AttackScript::kFakeDeposit); }) == ErrorCode::kUnsupportedScript);
    s.machine = sim::MachineKind::kWhitelist;
    REQUIRE(code_of([&] { sim::inject_attack(s, sim::AttackScript::kReentrantDrain); }) == ErrorCode::kUnsupportedScript);
    s.machine = sim::MachineKind::kDepositVault;
    REQUIRE(code_of([&] { sim::inject_attack(s, sim::AttackScript::kUnauthorizedCall); }) == ErrorCode::kUnsupportedScript);
}

TEST_CASE("erc20 conserves the supply on every trace") {
    auto c = sim::gen_corpus(spec_of(sim::MachineKind::kErc20, 300, 63));
    auto meta = ContractMeta::load(c.contract, c.abi_json, c.layout_json);
    auto conserve = parse_property("sum(state.balances)@PostCall == sum(state.balances)@PreCall");
    auto supply = parse_property("sum(state.balances)@PostCall == state.totalSupply@PostCall");
    size_t moves = 0;
    for (const auto& r : c.records) {
        for (const auto& t : extract_traces(r, meta)) {
            REQUIRE(evaluate(conserve, t) == Status::kSatisfied);
            REQUIRE(evaluate(supply, t) == Status::kSatisfied);
            moves += t.function == "transfer" || t.function == "transferFrom";
        }
    }
    REQUIRE(moves > 0);
}

TEST_CASE("every generated record extracts cleanly") {
    for (auto m : kMachines) {
        auto s = spec_of(m, 120, 64);
        s.holdout = 20;
        auto c = sim::gen_corpus(s);
        auto meta = ContractMeta::load(c.contract, c.abi_json, c.layout_json);
        std::set<std::string> functions;
        for (const auto* rs : {&c.records, &c.holdout})
            for (const auto& r : *rs)
                for (const auto& t : extract_traces(r, meta)) {
                    REQUIRE(t.warnings.empty());
                    functions.insert(t.function);
                }
        REQUIRE(functions.size() >= 2);
    }
}

TEST_CASE("anomaly manifest lists exactly the perturbed transfers") {
    auto s = spec_of(sim::MachineKind::kErc20, 400, 65);
    s.anomaly_rate = Rational{1, 20};
    auto c = sim::gen_corpus(s);
    REQUIRE(sim::anomaly_spacing(s.anomaly_rate) == 20);
    REQUIRE_FALSE(c.anomalies.empty());
    auto meta = ContractMeta::load(c.contract, c.abi_json, c.layout_json);
    auto credit = parse_property("fn.amt == delta(state.balances[fn.to])@[PreCall,PostCall]");
    std::set<size_t> manifest(c.anomalies.begin(), c.anomalies.end());
    for (size_t i = 0; i < c.records.size(); ++i) {
        for (const auto& t : extract_traces(c.records[i], meta)) {
            bool moved = std::any_of(t.logs.begin(), t.logs.end(), [](const auto& l) { return l.name == "Transfer"; });
            if (t.function != "transfer" || !moved) {
                REQUIRE(manifest.count(i) == 0);
                continue;
            }
            auto st = evaluate(credit, t);
            if (manifest.count(i)) REQUIRE(st == Status::kViolated);
            else REQUIRE(st == Status::kSatisfied);
        }
    }
    for (size_t i : c.anomalies) {
        for (const auto& t : extract_traces(c.records[i], meta)) REQUIRE(t.function == "transfer");
    }
    for (size_t k = 1; k < c.anomalies.size(); ++k) REQUIRE(c.anomalies[k] > c.anomalies[k - 1]);
}

TEST_CASE("each attack violates an invariant mined from benign history") {
    struct Case {
        sim::MachineKind machine;
        sim::AttackScript script;
    };
    for (auto [m, script] : {Case{sim::MachineKind::kDepositVault, sim::AttackScript::kFakeDeposit},
                             Case{sim::MachineKind::kDepositVault, sim::AttackScript::kReentrantDrain},
                             Case{sim::MachineKind::kWhitelist, sim::AttackScript::kUnauthorizedCall}}) {
        auto s = spec_of(m, 200, 66);
        s.attack = script;
        auto c = sim::gen_corpus(s);
        REQUIRE(c.attack);
        auto meta = ContractMeta::load(c.contract, c.abi_json, c.layout_json);
        std::vector<ExecutionTrace> traces;
        for (const auto& r : c.records)
            for (auto& t : extract_traces(r, meta)) traces.push_back(std::move(t));
        auto store = mine_contract(traces, meta, MinerConfig{});
        INFO(sim::to_string(script));
        REQUIRE(check_record(store, meta, *c.attack, 1).violation_count() > 0);
        REQUIRE(save_raw_records({*c.attack}) == save_raw_records({sim::inject_attack(spec_of(m, 200, 66), script)}));
    }
}
