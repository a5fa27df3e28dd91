// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "brute_force.hpp"
#include "hand_trace.hpp"
#include "ref_keccak.hpp"
#include "txoracle/checker.hpp"
#include "txoracle/inference.hpp"
#include "txoracle/persistence.hpp"
#include "txoracle/sim/scenario.hpp"

namespace fs = std::filesystem;
using namespace txoracle;

namespace {

const std::string kFixtures = TXORACLE_FIXTURES;
const std::string kCli = TXORACLE_CLI;

struct Outcome {
    bool pass{true};
    std::string detail;
};

struct Failed {
    std::string what;
};

void expect(bool cond, const std::string& what) {
    if (!cond) throw Failed{what};
}

struct CliRun {
    int status{-1};
    std::string out;
    double seconds{0};
};

std::string quote(const std::string& s) { return "'" + s + "'"; }

CliRun cli(const std::string& args) {
    auto start = std::chrono::steady_clock::now();
    CliRun r;
    FILE* p = popen((quote(kCli) + " " + args + " 2>&1").c_str(), "r");
    if (!p) throw Failed{"cannot start " + kCli};
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int raw = pclose(p);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

class Scratch {
  public:
    Scratch() {
        path_ = fs::temp_directory_path() / ("txoracle_acceptance_" + std::to_string(::getpid()));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~Scratch() { fs::remove_all(path_); }
    [[nodiscard]] std::string operator/(const std::string& name) const { return (path_ / name).string(); }

  private:
    fs::path path_;
};

struct Mined {
    sim::Corpus corpus;
    ContractMeta meta;
    std::vector<ExecutionTrace> traces;
};

Mined generate(const sim::ScenarioSpec& spec) {
    Mined m{sim::gen_corpus(spec), {}, {}};
    m.meta = ContractMeta::load(m.corpus.contract, m.corpus.abi_json, m.corpus.layout_json);
    for (const auto& r : m.corpus.records)
        for (auto& t : extract_traces(r, m.meta)) m.traces.push_back(std::move(t));
    return m;
}

using TextSets = std::map<std::string, std::set<std::string>>;

TextSets texts_of(const InvariantStore& store) {
    TextSets out;
    for (const auto& [key, set] : store.sets)
        for (const auto& inv : set.invariants) out[key].insert(inv.property.text);
    return out;
}

bool holds_in(const InvariantStore& store, const std::string& key_prefix, const std::string& text) {
    for (const auto& [key, set] : store.sets) {
        if (key.rfind(key_prefix, 0) != 0) continue;
        for (const auto& inv : set.invariants)
            if (inv.property.text == text) return true;
    }
    return false;
}

std::string fixture(const std::string& rel) { return kFixtures + "/" + rel; }

// ---------------------------------------------------------------------------

Outcome erc20_recovery() {
    Scratch dir;
    auto mine = cli("mine --traces " + quote(fixture("erc20/erc20.traces.ndjson")) + " --abi " +
                    quote(fixture("erc20/erc20.abi.json")) + " --layout " + quote(fixture("erc20/erc20.layout.json")) +
                    " --threshold 1.0 --out " + quote(dir / "erc20.store.json"));
    expect(mine.status == 0, "mine exited " + std::to_string(mine.status) + ": " + mine.out);
    expect(mine.seconds < 30, "mine took " + std::to_string(mine.seconds) + " s");
    auto store = load_store(read_file(dir / "erc20.store.json"));

    struct Expected {
        const char* id;
        const char* layer;
        const char* text;
    };
    const Expected table[] = {
        {"supply", "contract", "sum(state.balances)@PostCall == state.totalSupply@PostCall"},
        {"transfer debit", "branch:transfer:", "fn.amt == -delta(state.balances[tx.sender])@[PreCall,PostCall]"},
        {"transfer credit", "branch:transfer:", "fn.amt == delta(state.balances[fn.to])@[PreCall,PostCall]"},
        {"approve allowance", "function:approve:", "fn.amt == state.allowance[tx.sender][fn.spender]@PostCall"},
        {"transferFrom allowance", "branch:transferFrom:", "fn.amt == -delta(state.allowance[fn.from][tx.sender])@[PreCall,PostCall]"},
        {"transferFrom debit", "branch:transferFrom:", "fn.amt == -delta(state.balances[fn.from])@[PreCall,PostCall]"},
        {"transferFrom credit", "branch:transferFrom:", "fn.amt == delta(state.balances[fn.to])@[PreCall,PostCall]"},
    };
    for (const auto& e : table) expect(holds_in(store, e.layer, e.text), std::string{e.id} + " missing at " + e.layer);

    // transfer's silent skip keeps the credit relation at branch level only
    expect(holds_in(store, "function:transfer:", "sum(state.balances)@PostCall == sum(state.balances)@PreCall"),
           "transfer conservation missing at function level");
    expect(!holds_in(store, "function:transfer:", "fn.amt == delta(state.balances[fn.to])@[PreCall,PostCall]"),
           "transfer credit relation leaked to function level");

    auto show = cli("show --store " + quote(dir / "erc20.store.json"));
    expect(show.status == 0, "show failed");
    expect(show.out == read_file(fixture("erc20/golden.txt")), "store differs from the golden invariant list");

    std::ostringstream d;
    d << "7/7 erc20 invariants, " << store.invariant_count() << " invariants match golden, mine " << std::fixed
      << std::setprecision(2) << mine.seconds << " s";
    return {true, d.str()};
}

Outcome branch_layering() {
    sim::ScenarioSpec spec;
    spec.machine = sim::MachineKind::kDepositVault;
    spec.tx_count = 200;
    spec.holdout = 5;
    spec.seed = 5;
    spec.rune_only = true;
    auto rune = generate(spec);
    auto store = mine_contract(rune.traces, rune.meta, MinerConfig{});

    std::set<std::string> deposit_branches;
    std::string fn_key;
    for (const auto& [key, set] : store.sets) {
        if (set.key.function != "deposit") continue;
        if (set.key.layer == Layer::kBranch) deposit_branches.insert(key);
        if (set.key.layer == Layer::kFunction) fn_key = key;
    }
    expect(deposit_branches.size() == 1, "expected one deposit branch set, got " + std::to_string(deposit_branches.size()));
    expect(!fn_key.empty(), "no deposit function set");
    const std::string inv3 = "ev.Deposit[0].safeAmt == -delta(token[fn.ast][tx.sender])@[PreCall,PostCall]";
    expect(holds_in(store, fn_key, inv3), "deposit function set lacks the certificate invariant");

    // a mixed corpus from the same contract supplies non-RUNE deposits
    spec.rune_only = false;
    spec.tx_count = 80;
    auto mixed = sim::gen_corpus(spec);
    const RawTxRecord* other = nullptr;
    std::string other_branch;
    for (const auto& r : mixed.records) {
        for (const auto& t : extract_traces(r, rune.meta)) {
            if (t.function != "deposit" || deposit_branches.count(LayerKey::of_branch(t).str())) continue;
            other = &r;
            other_branch = LayerKey::of_branch(t).str();
        }
        if (other) break;
    }
    expect(other != nullptr, "mixed corpus has no non-RUNE deposit");
    expect(!store.sets.count(other_branch), "a non-RUNE branch set exists");

    auto fallback = check_record(store, rune.meta, *other, 1);
    expect(fallback.subtrees.size() == 1, "non-RUNE deposit should have one subtree");
    expect(fallback.subtrees[0].layer == fn_key, "non-RUNE deposit checked at " + fallback.subtrees[0].layer);

    auto direct = check_record(store, rune.meta, rune.corpus.holdout.front(), 1);
    expect(direct.subtrees.size() == 1 && direct.subtrees[0].layer == *deposit_branches.begin(),
           "RUNE deposit not checked at its branch set");
    expect(direct.violation_count() == 0, "benign RUNE deposit flagged");
    return {true, "RUNE deposit -> " + direct.subtrees[0].layer + ", other deposit -> " + fn_key};
}

Outcome attack_detection() {
    struct Case {
        sim::MachineKind machine;
        sim::AttackScript script;
        std::function<bool(const Violation&)> signature;
    };
    const std::vector<Case> cases{
        {sim::MachineKind::kDepositVault, sim::AttackScript::kFakeDeposit,
         [](const Violation& v) { return v.property.find("delta(token[") != std::string::npos; }},
        {sim::MachineKind::kWhitelist, sim::AttackScript::kUnauthorizedCall,
         [](const Violation& v) { return v.property.find("tx.sender in state.whitelist") != std::string::npos; }},
        {sim::MachineKind::kDepositVault, sim::AttackScript::kReentrantDrain,
         [](const Violation& v) { return v.property.find("SubCall(") != std::string::npos; }},
    };
    std::string detail;
    for (const auto& c : cases) {
        sim::ScenarioSpec spec;
        spec.machine = c.machine;
        spec.tx_count = 200;
        spec.holdout = 100;
        spec.seed = 3;
        spec.attack = c.script;
        auto m = generate(spec);
        auto store = mine_contract(m.traces, m.meta, MinerConfig{});
        std::vector<std::string> lines;
        for (const auto& r : m.corpus.holdout) lines.push_back(to_json(r).dump());
        lines.push_back(to_json(*m.corpus.attack).dump());
        auto reports = check_stream(store, lines);
        size_t flagged = 0, true_positive = 0;
        bool signature = false;
        for (const auto& r : reports) {
            expect(!r.error, "report error: " + r.error.value_or(""));
            if (r.violation_count() == 0) continue;
            ++flagged;
            if (r.position == lines.size()) ++true_positive;
            for (const auto& s : r.subtrees)
                for (const auto& v : s.violations) signature = signature || c.signature(v);
        }
        std::string name{sim::to_string(c.script)};
        expect(flagged == 1 && true_positive == 1,
               name + ": " + std::to_string(flagged) + " flagged, " + std::to_string(true_positive) + " true positives");
        expect(signature, name + ": expected violation kind not reported");
        detail += (detail.empty() ? "" : ", ") + name + " 1/101";
    }
    return {true, detail};
}

Outcome threshold_robustness() {
    sim::ScenarioSpec spec;
    spec.tx_count = 500;
    spec.seed = 7;
    auto clean = generate(spec);
    spec.anomaly_rate = Rational{1, 50};
    auto noisy = generate(spec);
    expect(!noisy.corpus.anomalies.empty(), "no anomalies injected");

    MinerConfig at98, at100;
    at100.threshold = 1;
    auto clean98 = texts_of(mine_contract(clean.traces, clean.meta, at98));
    auto noisy98 = texts_of(mine_contract(noisy.traces, noisy.meta, at98));
    expect(clean98 == noisy98, "threshold 0.98 does not reproduce the clean store");
    auto clean100 = mine_contract(clean.traces, clean.meta, at100);
    auto noisy100 = mine_contract(noisy.traces, noisy.meta, at100);
    const std::vector<std::string> targeted{"fn.amt == -delta(state.balances[tx.sender])@[PreCall,PostCall]",
                                            "fn.amt == delta(state.balances[fn.to])@[PreCall,PostCall]"};
    size_t lost = 0;
    for (const auto& t : targeted) lost += holds_in(clean100, "branch:transfer:", t) && !holds_in(noisy100, "branch:transfer:", t);
    expect(lost >= 1, "threshold 1.0 kept every targeted invariant");

    // higher threshold, fewer survivors, on random corpora
    std::mt19937_64 rng{2026};
    const std::vector<Rational> ladder{Rational{4, 5}, Rational{9, 10}, Rational{19, 20}, Rational{49, 50}, Rational{1}};
    const sim::MachineKind machines[] = {sim::MachineKind::kErc20, sim::MachineKind::kDepositVault, sim::MachineKind::kWhitelist};
    size_t checked_sets = 0;
    for (int i = 0; i < 20; ++i) {
        sim::ScenarioSpec s;
        s.machine = machines[i % 3];
        s.tx_count = 40 + rng() % 60;
        s.seed = rng();
        if (s.machine == sim::MachineKind::kErc20) s.anomaly_rate = Rational{1, 10 + static_cast<long>(rng() % 20)};
        auto m = generate(s);
        std::map<std::string, std::set<std::string>> prev;
        for (size_t k = 0; k < ladder.size(); ++k) {
            MinerConfig cfg;
            cfg.threshold = ladder[k];
            auto r = mine_contract_detailed(m.traces, m.meta, cfg);
            for (const auto& [key, filtered] : r.filtered) {
                std::set<std::string> cur;
                for (const auto& inv : filtered) cur.insert(inv.property.text);
                if (k > 0) {
                    for (const auto& t : cur)
                        expect(prev[key].count(t) == 1, "corpus " + std::to_string(i) + " " + key + ": " + t + " appears above a lower threshold");
                    ++checked_sets;
                }
                prev[key] = std::move(cur);
            }
        }
    }
    return {true, std::to_string(noisy.corpus.anomalies.size()) + " anomalies; 0.98 reproduces clean store; 1.0 loses " +
                      std::to_string(lost) + " targeted; monotone over 20 corpora (" + std::to_string(checked_sets) + " set pairs)"};
}

Outcome determinism() {
    Scratch dir;
    auto lines = ndjson_lines(read_file(fixture("erc20/erc20.traces.ndjson")));
    std::mt19937_64 rng{11};
    std::vector<std::string> stores;
    for (int run = 0; run < 2; ++run) {
        auto shuffled = lines;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        expect(shuffled != lines, "shuffle left the order unchanged");
        std::string text;
        for (const auto& l : shuffled) text += l + "\n";
        auto traces = dir / ("perm" + std::to_string(run) + ".ndjson");
        auto out = dir / ("perm" + std::to_string(run) + ".store.json");
        write_file(traces, text);
        auto r = cli("mine --traces " + quote(traces) + " --abi " + quote(fixture("erc20/erc20.abi.json")) + " --layout " +
                     quote(fixture("erc20/erc20.layout.json")) + " --out " + quote(out));
        expect(r.status == 0, "mine failed: " + r.out);
        stores.push_back(read_file(out));
    }
    expect(stores[0] == stores[1], "permuted inputs gave different stores");
    return {true, "2 permutations, " + std::to_string(stores[0].size()) + " identical bytes"};
}

Outcome brute_force_equivalence() {
    std::mt19937_64 rng{50};
    size_t relations = 0;
    for (int i = 0; i < 50; ++i) {
        auto t = reftest::random_small_trace(rng, 1 + rng() % 6);
        TraceView view{t};
        for (bool ordering : {false, true}) {
            std::set<std::string> got;
            for (const auto& p : detect_comparison(view, {ordering, 20000})) got.insert(p.text);
            expect(got == reftest::brute_force_comparisons(view, ordering), "comparison mismatch on trace " + std::to_string(i));
            relations += got.size();
        }
        std::set<std::string> got;
        for (const auto& p : detect_membership(view)) got.insert(p.text);
        expect(got == reftest::brute_force_memberships(view), "membership mismatch on trace " + std::to_string(i));
        relations += got.size();
    }

    reftest::HandTrace h;
    h.sender(reftest::addr(0xb)).param("ast", TypedValue::address(reftest::addr(0xa))).param("amt", TypedValue::unsigned_int(50));
    h.token(RecordPoint::pre_call(), reftest::addr(0xa), reftest::addr(0xb), 100);
    h.token(RecordPoint::post_call(), reftest::addr(0xa), reftest::addr(0xb), 50);
    auto trace = h.get();
    std::set<std::string> closure;
    for (const auto& d : infer_fixpoint({parse_property("token[0xa][0xb]@PostCall == fn.amt")}, TraceView{trace}))
        closure.insert(d.property.text);
    const std::set<std::string> want{
        "fn.amt == token[0xa][0xb]@PostCall",
        "fn.amt == token[0xa][tx.sender]@PostCall",
        "fn.amt == token[fn.ast][0xb]@PostCall",
        "fn.amt == token[fn.ast][tx.sender]@PostCall",
    };
    expect(closure == want, "two key closure differs from the hand enumeration");
    return {true, "50 traces, " + std::to_string(relations) + " relations; closure 4/4"};
}

std::vector<uint8_t> pad_word(const Word& w) { return {w.bytes.begin(), w.bytes.end()}; }

Outcome keccak_abi_conformance() {
    std::mt19937_64 rng{1000};
    for (int i = 0; i < 1000; ++i) {
        Word key, slot;
        for (auto& b : key.bytes) b = static_cast<uint8_t>(rng());
        // small slots dominate real layouts
        if (i % 2) slot = Word::from_u64(rng() % 64);
        else
            for (auto& b : slot.bytes) b = static_cast<uint8_t>(rng());
        auto buf = pad_word(key);
        auto s = pad_word(slot);
        buf.insert(buf.end(), s.begin(), s.end());
        auto want = reftest::keccak256(buf);
        expect(std::equal(want.begin(), want.end(), mapping_slot(key, slot).bytes.begin()), "mapping slot mismatch at vector " + std::to_string(i));
    }

    const auto& token_abi = sim::token_abi_index();
    size_t calls = 0, events = 0;
    for (const char* base : {"erc20/erc20", "check/vault"}) {
        auto abi = parse_abi(read_file(fixture(std::string{base} + ".abi.json")));
        for (const char* part : {".traces.ndjson", ".holdout.traces.ndjson"}) {
            auto path = fixture(std::string{base} + part);
            if (!fs::exists(path)) continue;
            for (const auto& rec : load_raw_records(read_file(path))) {
                for (const auto& step : rec.steps) {
                    if (const auto* c = std::get_if<CallEnter>(&step)) {
                        if (c->calldata.size() < 4) continue;
                        uint32_t sel = (uint32_t{c->calldata[0]} << 24) | (uint32_t{c->calldata[1]} << 16) |
                                       (uint32_t{c->calldata[2]} << 8) | c->calldata[3];
                        const AbiIndex* idx = abi.functions.count(sel) ? &abi : token_abi.functions.count(sel) ? &token_abi : nullptr;
                        expect(idx != nullptr, "fixture calldata with unknown selector " + selector_hex(sel));
                        auto d = decode_calldata(*idx, c->calldata);
                        std::vector<TypedValue> args;
                        for (auto& [_, v] : d.params) args.push_back(v);
                        expect(encode_call(idx->functions.at(sel), args) == c->calldata, "calldata round trip failed");
                        ++calls;
                    } else if (const auto* e = std::get_if<EventEmit>(&step)) {
                        const AbiIndex* idx = abi.events.count(e->topics.at(0)) ? &abi : &token_abi;
                        auto d = decode_event(*idx, e->topics, e->data);
                        std::vector<TypedValue> args;
                        for (auto& [_, v] : d.params) args.push_back(v);
                        auto enc = encode_event(idx->events.at(e->topics[0]), args);
                        expect(enc.topics == e->topics && enc.data == e->data, "event round trip failed");
                        ++events;
                    }
                }
            }
        }
    }
    expect(calls > 0 && events > 0, "fixtures carry no calldata or events");
    return {true, "1000/1000 slots; " + std::to_string(calls) + " calls and " + std::to_string(events) + " events round trip"};
}

Outcome throughput() {
    Scratch dir;
    auto mine = cli("mine --traces " + quote(fixture("check/vault.traces.ndjson")) + " --abi " + quote(fixture("check/vault.abi.json")) +
                    " --layout " + quote(fixture("check/vault.layout.json")) + " --out " + quote(dir / "vault.store.json"));
    expect(mine.status == 0, "mine failed: " + mine.out);
    auto check = cli("check --store " + quote(dir / "vault.store.json") + " --traces " +
                     quote(fixture("check/vault.holdout.traces.ndjson")) + " --out " + quote(dir / "vault.reports.ndjson"));
    expect(check.status == 0, "check exited " + std::to_string(check.status) + ": " + check.out);
    std::smatch m;
    expect(std::regex_search(check.out, m, std::regex{R"(checked (\d+) transactions)"}) && m[1] == "1000",
           "expected 1000 checked transactions");
    expect(std::regex_search(check.out, m, std::regex{R"(throughput ([0-9.]+) tx/s)"}), "no throughput line");
    double reported = std::stod(m[1]);
    double process = 1000.0 / check.seconds;
    expect(reported >= 20, "reported throughput " + std::to_string(reported) + " tx/s");
    expect(process >= 20, "process throughput " + std::to_string(process) + " tx/s");
    std::ostringstream d;
    d << std::fixed << std::setprecision(1) << reported << " tx/s reported, " << process << " tx/s including store load";
    return {true, d.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"erc20-recovery", erc20_recovery},
        {"branch-layering", branch_layering},
        {"attack-detection", attack_detection},
        {"threshold-robustness", threshold_robustness},
        {"determinism", determinism},
        {"brute-force-oracle", brute_force_equivalence},
        {"keccak-abi-conformance", keccak_abi_conformance},
        {"throughput", throughput},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const Failed& f) {
            o = {false, f.what};
        } catch (const std::exception& e) {
            o = {false, std::string{"exception: "} + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::ostringstream line;
        line << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << " [" << std::fixed << std::setprecision(1) << secs
             << " s]";
        std::cout << line.str() << std::endl;
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
