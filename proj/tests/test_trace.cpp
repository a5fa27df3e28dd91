// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include <catch_amalgamated.hpp>

#include "txoracle/sim/scenario.hpp"
#include "txoracle/trace.hpp"

using namespace txoracle;

namespace {

sim::Corpus corpus_of(sim::MachineKind m, size_t txs, uint64_t seed, std::optional<sim::AttackScript> attack = {}) {
    sim::ScenarioSpec spec;
    spec.machine = m;
    spec.tx_count = txs;
    spec.seed = seed;
    spec.attack = attack;
    return sim::gen_corpus(spec);
}

ContractMeta meta_of(const sim::Corpus& c) { return ContractMeta::load(c.contract, c.abi_json, c.layout_json); }

const Word kA = parse_address("0x000000000000000000000000000000000000000a");
const Word kB = parse_address("0x000000000000000000000000000000000000000b");
const Word kC = parse_address("0x000000000000000000000000000000000000000c");

RawTxRecord record(std::vector<Step> steps) {
    RawTxRecord r;
    r.header.tx_hash = Word::from_u64(99);
    r.steps = std::move(steps);
    return r;
}

template <typename F>
void pre_order(const TxNode& n, F&& f) {
    f(n);
    for (const auto* c : n.calls()) pre_order(*c, f);
}

}  // namespace

TEST_CASE("single call with two events has two event children") {
    auto cft = build_cft(record({CallEnter{kA, kB, {}, 0}, EventEmit{kB, {Word::from_u64(1)}, {}}, Jumpi{7},
                                 EventEmit{kB, {Word::from_u64(2)}, {}}, CallExit{true}}));
    REQUIRE(cft.root->children.size() == 2);
    for (const auto& c : cft.root->children) REQUIRE(std::holds_alternative<EventNode>(c));
    REQUIRE(cft.root->jumpis == std::vector<uint64_t>{7});
}

TEST_CASE("deposit derives a transferFrom call then the Deposit event") {
    auto c = corpus_of(sim::MachineKind::kDepositVault, 30, 3);
    auto meta = meta_of(c);
    bool seen = false;
    for (const auto& r : c.records) {
        auto cft = build_cft(r);
        auto traces = extract_traces(r, meta);
        REQUIRE(traces.size() == 1);
        if (traces[0].function != "deposit") continue;
        seen = true;
        const auto& kids = cft.root->children;
        REQUIRE(kids.size() == 2);
        REQUIRE(std::holds_alternative<TxNodePtr>(kids[0]));
        REQUIRE(std::holds_alternative<EventNode>(kids[1]));
        REQUIRE(decode_calldata(sim::token_abi_index(), std::get<TxNodePtr>(kids[0])->calldata).function == "transferFrom");
        REQUIRE(traces[0].logs.size() == 1);
        REQUIRE(traces[0].logs[0].name == "Deposit");
        REQUIRE(traces[0].subcalls == 1);
        REQUIRE(traces[0].snapshots.size() == 4);
    }
    REQUIRE(seen);
}

TEST_CASE("unbalanced or misplaced steps are malformed") {
    auto code = [](std::vector<Step> steps) {
        try {
            build_cft(record(std::move(steps)));
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::kConfig;
    };
    REQUIRE(code({CallEnter{kA, kB, {}, 0}}) == ErrorCode::kMalformedRecord);
    REQUIRE(code({CallEnter{kA, kB, {}, 0}, CallExit{}, CallExit{}}) == ErrorCode::kMalformedRecord);
    REQUIRE(code({Jumpi{1}}) == ErrorCode::kMalformedRecord);
    REQUIRE(code({}) == ErrorCode::kMalformedRecord);
    REQUIRE(code({CallEnter{kA, kB, {}, 0}, StorageAccess{kC, Word{}, Word{}, Word{}, false}, CallExit{}}) == ErrorCode::kMalformedRecord);
    REQUIRE(code({CallEnter{kA, kB, {}, 0}, CallExit{}, CallEnter{kA, kB, {}, 0}, CallExit{}}) == ErrorCode::kMalformedRecord);
}

TEST_CASE("relevant subtree selection") {
    auto plain = build_cft(record({CallEnter{kA, kB, {}, 0}, CallExit{}}));
    REQUIRE(select_relevant_subtrees(plain, kC).empty());

    auto third = build_cft(record({CallEnter{kA, kB, {}, 0}, CallEnter{kB, kA, {}, 0}, CallExit{}, CallEnter{kB, kA, {}, 0},
                                   CallExit{}, CallEnter{kB, kC, {1, 2, 3, 4}, 0}, CallExit{}, CallExit{}}));
    auto nodes = select_relevant_subtrees(third, kC);
    REQUIRE(nodes.size() == 1);
    REQUIRE(nodes[0]->calldata == Bytes{1, 2, 3, 4});
    REQUIRE(nodes[0]->depth == 1);

    auto c = corpus_of(sim::MachineKind::kDepositVault, 20, 4, sim::AttackScript::kReentrantDrain);
    auto reentrant = build_cft(*c.attack);
    auto hits = select_relevant_subtrees(reentrant, c.contract);
    REQUIRE(hits.size() == 2);
    REQUIRE(hits[1]->depth > hits[0]->depth);
}

TEST_CASE("branch fingerprints") {
    auto empty = build_cft(record({CallEnter{kA, kB, {}, 0}, CallExit{}}));
    REQUIRE(branch_fingerprint(*empty.root) == keccak256(std::string_view{}));

    auto one = build_cft(record({CallEnter{kA, kB, {}, 0}, Jumpi{5}, CallEnter{kB, kC, {}, 0}, Jumpi{9}, CallExit{}, CallExit{}}));
    auto two = build_cft(record({CallEnter{kC, kB, {}, 0}, Jumpi{5}, CallExit{}}));
    REQUIRE(branch_fingerprint(*one.root) == branch_fingerprint(*two.root));
    auto other = build_cft(record({CallEnter{kA, kB, {}, 0}, Jumpi{6}, CallExit{}}));
    REQUIRE(branch_fingerprint(*one.root) != branch_fingerprint(*other.root));

    auto c = corpus_of(sim::MachineKind::kDepositVault, 60, 8);
    auto meta = meta_of(c);
    std::map<uint64_t, std::set<Word>> by_jump;
    for (const auto& r : c.records) {
        auto t = extract_traces(r, meta).at(0);
        if (t.function != "deposit") continue;
        auto cft = build_cft(r);
        by_jump[cft.root->jumpis.at(0)].insert(t.branch);
    }
    REQUIRE(by_jump.size() == 2);
    REQUIRE(by_jump[sim::DepositVault::kRuneBranch].size() == 1);
    REQUIRE(by_jump[sim::DepositVault::kOtherBranch].size() == 1);
    REQUIRE(*by_jump[sim::DepositVault::kRuneBranch].begin() != *by_jump[sim::DepositVault::kOtherBranch].begin());
}

TEST_CASE("candidate keys") {
    auto abi = sim::token_abi_index();
    auto data = encode_call(*abi.function_by_name("transfer"), {TypedValue::address(kC), TypedValue::unsigned_int(77)});
    auto cft = build_cft(record({CallEnter{kA, kB, data, 0}, CallExit{}}));
    auto call = decode_calldata(abi, data);
    auto keys = candidate_keys(*cft.root, kB, call.params, {});
    for (const auto& k : {kA, kB, kC, Word::from_u64(77), Word{}}) REQUIRE(std::count(keys.begin(), keys.end(), k) == 1);

    auto bare = build_cft(record({CallEnter{kA, kB, {}, 0}, CallExit{}}));
    auto none = candidate_keys(*bare.root, kB, {}, {});
    std::vector<Word> want{kA, kB, Word{}};
    std::sort(want.begin(), want.end());
    REQUIRE(none == want);

    auto c = corpus_of(sim::MachineKind::kDepositVault, 10, 2);
    auto meta = meta_of(c);
    for (const auto& r : c.records) {
        auto t = extract_traces(r, meta).at(0);
        if (t.function != "deposit") continue;
        auto tree = build_cft(r);
        auto k = candidate_keys(*tree.root, c.contract, t.params, t.logs);
        for (const auto& [name, v] : t.params) {
            if (v.tag != ValueTag::kAddress) continue;
            REQUIRE(std::count(k.begin(), k.end(), Word::from_uint(v.number)) == 1);
        }
        REQUIRE(std::count(k.begin(), k.end(), tree.root->sender) == 1);
        REQUIRE(std::count(k.begin(), k.end(), c.contract) == 1);
    }
}

TEST_CASE("transfer success moves amt into the receiver balance") {
    auto c = corpus_of(sim::MachineKind::kErc20, 80, 9);
    auto meta = meta_of(c);
    size_t checked = 0;
    for (const auto& r : c.records) {
        auto t = extract_traces(r, meta).at(0);
        if (t.function != "transfer" || t.logs.empty()) continue;
        Word to = Word::from_uint(t.params.at(0).second.number);
        const BigInt& amt = t.params.at(1).second.number;
        StateId id{"balances", {to}, ""};
        BigInt pre = t.snapshots.at(RecordPoint::pre_call()).vars.at(id).number;
        BigInt post = t.snapshots.at(RecordPoint::post_call()).vars.at(id).number;
        REQUIRE(post - pre == amt);
        ++checked;
    }
    REQUIRE(checked > 10);
}

TEST_CASE("call touching no storage has empty snapshots") {
    auto c = corpus_of(sim::MachineKind::kErc20, 1, 1);
    auto meta = meta_of(c);
    auto traces = extract_traces(record({CallEnter{kA, c.contract, {}, 0}, CallExit{}}), meta);
    REQUIRE(traces.size() == 1);
    REQUIRE(traces[0].function == "fallback");
    REQUIRE(traces[0].snapshots.size() == 2);
    for (const auto& [_, s] : traces[0].snapshots) {
        REQUIRE(s.vars.empty());
        REQUIRE(s.tokens.empty());
    }
}

TEST_CASE("fake deposit leaves the vault token balance unchanged") {
    auto c = corpus_of(sim::MachineKind::kDepositVault, 10, 6, sim::AttackScript::kFakeDeposit);
    auto t = extract_traces(*c.attack, meta_of(c)).at(0);
    REQUIRE(t.function == "deposit");
    Word ast = Word::from_uint(t.params.at(1).second.number);
    REQUIRE(ast == sim::sim_address("vault/token/FAKE"));
    auto key = std::pair{ast, c.contract};
    REQUIRE(t.snapshots.at(RecordPoint::pre_call()).tokens.at(key) == t.snapshots.at(RecordPoint::post_call()).tokens.at(key));
    REQUIRE(t.logs.at(0).params.at(2).second.number > 0);
}

TEST_CASE("cft pre-order reproduces the enter order") {
    for (auto m : {sim::MachineKind::kErc20, sim::MachineKind::kDepositVault, sim::MachineKind::kWhitelist}) {
        auto c = corpus_of(m, 40, 12);
        for (const auto& r : c.records) {
            std::vector<size_t> enters;
            for (size_t i = 0; i < r.steps.size(); ++i)
                if (std::holds_alternative<CallEnter>(r.steps[i])) enters.push_back(i);
            std::vector<size_t> walked;
            auto cft = build_cft(r);
            pre_order(*cft.root, [&](const TxNode& n) { walked.push_back(n.enter_seq); });
            REQUIRE(walked == enters);
        }
    }
}

TEST_CASE("snapshots agree with the first and last storage access") {
    auto c = corpus_of(sim::MachineKind::kErc20, 40, 13);
    auto meta = meta_of(c);
    for (const auto& r : c.records) {
        auto cft = build_cft(r);
        std::map<Word, std::pair<Word, Word>> want;
        for (const auto& step : r.steps) {
            const auto* a = std::get_if<StorageAccess>(&step);
            if (!a) continue;
            auto [it, fresh] = want.try_emplace(a->slot, a->pre, a->post);
            if (!fresh) it->second.second = a->post;
        }
        REQUIRE(cft.root->storage_diff == want);
        auto t = extract_traces(r, meta).at(0);
        const auto& pre = t.snapshots.at(RecordPoint::pre_call());
        const auto& post = t.snapshots.at(RecordPoint::post_call());
        for (const auto& [slot, values] : want) {
            auto loc = locate_state_variable(meta.layout, slot, candidate_keys(*cft.root, c.contract, t.params, t.logs, r.header.key_hints));
            REQUIRE(loc);
            StateId id{loc->label, loc->key_path, loc->member};
            REQUIRE(pre.vars.at(id).number == values.first.to_uint());
            REQUIRE(post.vars.at(id).number == values.second.to_uint());
        }
    }
}

TEST_CASE("extraction is deterministic and traces round trip") {
    auto c = corpus_of(sim::MachineKind::kDepositVault, 40, 14, sim::AttackScript::kReentrantDrain);
    auto meta = meta_of(c);
    auto records = c.records;
    records.push_back(*c.attack);
    for (const auto& r : records) {
        auto a = extract_traces(r, meta);
        auto b = extract_traces(r, meta);
        REQUIRE(a.size() == b.size());
        for (size_t i = 0; i < a.size(); ++i) {
            REQUIRE(to_json(a[i]).dump() == to_json(b[i]).dump());
            REQUIRE(execution_trace_from_json(to_json(a[i])) == a[i]);
        }
    }
}

TEST_CASE("reentrant withdraw opens sub call record points") {
    auto c = corpus_of(sim::MachineKind::kDepositVault, 20, 15, sim::AttackScript::kReentrantDrain);
    auto traces = extract_traces(*c.attack, meta_of(c));
    REQUIRE(traces.size() == 2);
    REQUIRE(traces[0].function == "withdraw");
    REQUIRE(traces[0].subcalls == 1);
    REQUIRE(traces[0].snapshots.count(RecordPoint::pre_sub(0)) == 1);
    REQUIRE(traces[0].snapshots.count(RecordPoint::post_sub(0)) == 1);
    REQUIRE(traces[1].subtree == 1);
}
