// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "checker.hpp"
#include "persistence.hpp"
#include "sim/scenario.hpp"

#ifndef TXORACLE_VERSION
#define TXORACLE_VERSION "0.0.0"
#endif

namespace txoracle::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolations = 1;
inline constexpr int kExitUsage = 2;

/// Mean/median/total of one phase, in milliseconds.
struct PhaseTiming {
    double mean{0};
    double median{0};
    double total{0};
    size_t samples{0};
};

inline PhaseTiming summarize(std::vector<double> ms) {
    PhaseTiming t;
    t.samples = ms.size();
    if (ms.empty()) return t;
    for (double m : ms) t.total += m;
    t.mean = t.total / static_cast<double>(ms.size());
    std::sort(ms.begin(), ms.end());
    size_t n = ms.size();
    t.median = n % 2 ? ms[n / 2] : (ms[n / 2 - 1] + ms[n / 2]) / 2;
    return t;
}

struct RunManifest {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    std::map<std::string, std::string> inputs;
    std::map<std::string, std::string> outputs;
    std::string corpus_digest;
    std::map<std::string, PhaseTiming> timings;
    std::vector<std::string> argv;
    nlohmann::json extra = nlohmann::json::object();
};

inline nlohmann::json to_json(const RunManifest& m) {
    nlohmann::json timings = nlohmann::json::object();
    for (const auto& [phase, t] : m.timings)
        timings[phase] = {{"meanMs", t.mean}, {"medianMs", t.median}, {"totalMs", t.total}, {"samples", t.samples}};
    nlohmann::json j{{"command", m.command},
                     {"toolVersion", TXORACLE_VERSION},
                     {"config", m.config},
                     {"inputs", m.inputs},
                     {"outputs", m.outputs},
                     {"corpusDigest", m.corpus_digest},
                     {"timings", timings},
                     {"argv", m.argv}};
    for (const auto& [k, v] : m.extra.items()) j[k] = v;
    return j;
}

/// "x.store.json" -> "x.manifest.json"; other names get the suffix appended.
inline std::string manifest_path(const std::string& out, std::string_view suffix) {
    if (out.size() > suffix.size() && out.compare(out.size() - suffix.size(), suffix.size(), suffix) == 0)
        return out.substr(0, out.size() - suffix.size()) + ".manifest.json";
    return out + ".manifest.json";
}

inline double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

/// Receiver of the root call that occurs most often; ties go to the smaller address.
inline Word most_frequent_receiver(const std::vector<RawTxRecord>& records) {
    std::map<Word, size_t> counts;
    for (const auto& r : records)
        for (const auto& s : r.steps)
            if (const auto* e = std::get_if<CallEnter>(&s)) {
                ++counts[e->receiver];
                break;
            }
    Word best;
    size_t n = 0;
    for (const auto& [w, c] : counts)
        if (c > n) best = w, n = c;
    return best;
}

/// Extract every relevant trace, optionally on several threads, preserving record order.
inline std::vector<ExecutionTrace> extract_all(const std::vector<RawTxRecord>& records, const ContractMeta& meta,
                                               unsigned threads, std::vector<double>* per_tx_ms = nullptr) {
    std::vector<std::vector<ExecutionTrace>> parts(records.size());
    std::vector<double> ms(records.size());
    std::vector<std::optional<Error>> errors(records.size());
    auto work = [&](size_t first, size_t stride) {
        for (size_t i = first; i < records.size(); i += stride) {
            auto start = std::chrono::steady_clock::now();
            try {
                parts[i] = extract_traces(records[i], meta);
            } catch (const Error& e) {
                errors[i] = e;
            }
            ms[i] = elapsed_ms(start);
        }
    };
    threads = std::max(1u, threads);
    if (threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
        for (auto& t : pool) t.join();
    }
    for (size_t i = 0; i < records.size(); ++i)
        if (errors[i]) throw Error(errors[i]->code(), "record " + std::to_string(i + 1) + ": " + errors[i]->what());
    std::vector<ExecutionTrace> out;
    for (auto& p : parts)
        for (auto& t : p) out.push_back(std::move(t));
    if (per_tx_ms) *per_tx_ms = std::move(ms);
    return out;
}

inline std::string format_ms(double ms) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(3) << ms;
    return s.str();
}

// ---------------------------------------------------------------------------
// commands

struct GenOptions {
    std::string scenario{"erc20"};
    size_t txs{500};
    size_t holdout{0};
    uint64_t seed{7};
    size_t population{6};
    std::string anomaly_rate{"0"};
    std::string attack;
    bool rune_only{false};
    std::string out;
};

inline int cmd_gen(const GenOptions& o, const std::vector<std::string>& argv, std::ostream& out) {
    auto start = std::chrono::steady_clock::now();
    sim::ScenarioSpec spec;
    spec.machine = sim::parse_machine(o.scenario);
    spec.tx_count = o.txs;
    spec.holdout = o.holdout;
    spec.seed = o.seed;
    spec.population = o.population;
    spec.anomaly_rate = parse_fraction(o.anomaly_rate);
    spec.rune_only = o.rune_only;
    if (!o.attack.empty()) spec.attack = sim::parse_attack_script(o.attack);
    auto corpus = sim::gen_corpus(spec);

    std::string prefix = o.out.empty() ? o.scenario : o.out;
    RunManifest m;
    m.command = "gen";
    m.argv = argv;
    m.config = to_json(spec);
    auto emit = [&](const std::string& role, const std::string& path, const std::string& content) {
        write_file(path, content);
        m.outputs[role] = path;
        m.extra["digests"][role] = keccak256(content).hex();
    };
    emit("traces", prefix + ".traces.ndjson", save_raw_records(corpus.records));
    emit("abi", prefix + ".abi.json", nlohmann::json::parse(corpus.abi_json).dump(1) + "\n");
    emit("layout", prefix + ".layout.json", nlohmann::json::parse(corpus.layout_json).dump(1) + "\n");
    if (spec.holdout > 0) emit("holdout", prefix + ".holdout.traces.ndjson", save_raw_records(corpus.holdout));
    if (corpus.attack) emit("attack", prefix + ".attack.traces.ndjson", save_raw_records({*corpus.attack}));
    m.extra["contract"] = address_hex(corpus.contract);
    m.extra["anomalies"] = corpus.anomalies;
    m.timings["generate"] = summarize({elapsed_ms(start)});
    write_file(prefix + ".manifest.json", to_json(m).dump(1) + "\n");

    out << "generated " << corpus.records.size() << " transactions for " << address_hex(corpus.contract) << " -> "
        << prefix << ".traces.ndjson\n";
    if (!corpus.anomalies.empty()) out << "injected " << corpus.anomalies.size() << " anomalies\n";
    return kExitOk;
}

struct MineOptions {
    std::string traces;
    std::string abi;
    std::string layout;
    std::string contract;
    std::string config;
    std::string out{"invariants.store.json"};
    unsigned threads{1};
    std::optional<std::string> threshold;
    std::optional<size_t> min_support;
    std::optional<std::string> min_applicable;
    std::optional<bool> include_ordering;
    std::optional<size_t> pair_budget;
    std::optional<bool> include_reverted;
};

inline MinerConfig resolve_config(const MineOptions& o) {
    MinerConfig cfg;
    if (!o.config.empty()) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_file(o.config));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::kConfig, e.what());
        }
        cfg = miner_config_from_json(j, cfg);
    }
    try {
        if (o.threshold) cfg.threshold = parse_fraction(*o.threshold);
        if (o.min_applicable) cfg.min_applicable_fraction = parse_fraction(*o.min_applicable);
    } catch (const Error& e) {
        throw Error(ErrorCode::kConfig, e.what());
    }
    if (o.min_support) cfg.min_support = *o.min_support;
    if (o.include_ordering) cfg.include_ordering = *o.include_ordering;
    if (o.pair_budget) cfg.pair_budget = *o.pair_budget;
    if (o.include_reverted) cfg.include_reverted = *o.include_reverted;
    cfg.validate();
    return cfg;
}

inline int cmd_mine(const MineOptions& o, const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    MinerConfig cfg = resolve_config(o);
    RunManifest m;
    m.command = "mine";
    m.argv = argv;
    m.config = to_json(cfg);
    m.inputs = {{"traces", o.traces}, {"abi", o.abi}, {"layout", o.layout}};
    if (!o.config.empty()) m.inputs["config"] = o.config;

    auto t0 = std::chrono::steady_clock::now();
    auto records = load_raw_records(read_file(o.traces));
    std::string abi = read_file(o.abi);
    std::string layout = read_file(o.layout);
    m.timings["parse"] = summarize({elapsed_ms(t0)});

    Word contract = o.contract.empty() ? most_frequent_receiver(records) : parse_address(o.contract);
    if (records.empty()) err << "warning: " << o.traces << " contains no transactions; writing an empty store\n";
    auto meta = ContractMeta::load(contract, abi, layout);

    std::vector<double> extract_ms;
    auto traces = extract_all(records, meta, o.threads, &extract_ms);
    m.timings["extract"] = summarize(extract_ms);

    auto t1 = std::chrono::steady_clock::now();
    auto store = mine_contract(traces, meta, cfg);
    m.timings["mine"] = summarize({elapsed_ms(t1)});

    write_file(o.out, save_store(store));
    m.outputs["store"] = o.out;
    m.corpus_digest = store.corpus_digest;
    m.extra["contract"] = address_hex(contract);
    write_file(manifest_path(o.out, ".store.json"), to_json(m).dump(1) + "\n");

    out << "contract " << address_hex(contract) << ": " << records.size() << " transactions, " << store.trace_count
        << " traces\n";
    for (const auto& [key, set] : store.sets) {
        out << "  " << key << ": " << set.invariants.size() << " invariants (group " << set.group_size
            << (set.group_too_small ? ", too small" : "") << ")\n";
    }
    out << store.invariant_count() << " invariants -> " << o.out << "\n";
    return kExitOk;
}

struct CheckOptions {
    std::string store;
    std::string traces;
    std::string out{"reports.ndjson"};
    unsigned threads{1};
};

inline int cmd_check(const CheckOptions& o, const std::vector<std::string>& argv, std::ostream& out) {
    auto store = load_store(read_file(o.store));
    auto lines = ndjson_lines(read_file(o.traces));

    auto start = std::chrono::steady_clock::now();
    auto reports = check_stream(store, lines, o.threads);
    double wall = elapsed_ms(start);

    std::string ndjson;
    std::vector<double> per_tx;
    size_t violating = 0, errors = 0;
    for (const auto& r : reports) {
        ndjson += to_json(r).dump() + "\n";
        per_tx.push_back(r.millis);
        if (r.error) ++errors;
        if (r.violation_count() > 0) {
            ++violating;
            out << render_report(r);
        } else if (r.error) {
            out << render_report(r);
        }
    }
    write_file(o.out, ndjson);

    auto timing = summarize(per_tx);
    double rate = wall > 0 ? 1000.0 * static_cast<double>(reports.size()) / wall : 0;
    RunManifest m;
    m.command = "check";
    m.argv = argv;
    m.config = to_json(store.config);
    m.inputs = {{"store", o.store}, {"traces", o.traces}};
    m.outputs = {{"reports", o.out}};
    m.corpus_digest = store.corpus_digest;
    m.timings["check"] = timing;
    m.extra["throughputTxPerSec"] = rate;
    m.extra["violatingTransactions"] = violating;
    write_file(manifest_path(o.out, ".reports.ndjson"), to_json(m).dump(1) + "\n");

    out << "checked " << reports.size() << " transactions: " << violating << " violating, " << errors << " errors\n";
    out << "check time per transaction: mean " << format_ms(timing.mean) << " ms, median " << format_ms(timing.median)
        << " ms; throughput " << std::fixed << std::setprecision(1) << rate << " tx/s\n";
    if (errors > 0 && violating == 0) return kExitUsage;
    return violating > 0 ? kExitViolations : kExitOk;
}

struct ShowOptions {
    std::string store;
    std::string layer;
    std::string fn;
    std::string pattern;
};

inline int cmd_show(const ShowOptions& o, std::ostream& out) {
    auto store = load_store(read_file(o.store));
    if (!o.layer.empty() && o.layer != "contract" && o.layer != "function" && o.layer != "branch")
        throw CLI::ValidationError("--layer", "expected contract, function or branch");
    static const std::vector<std::string> kPatterns{"comparison", "membership", "arithmetic", "inference", "constant"};
    if (!o.pattern.empty() && std::find(kPatterns.begin(), kPatterns.end(), o.pattern) == kPatterns.end())
        throw CLI::ValidationError("--pattern", "unknown pattern " + o.pattern);
    size_t shown = 0;
    for (const auto& [key, set] : store.sets) {
        if (!o.layer.empty() && to_string(set.key.layer) != o.layer) continue;
        if (!o.fn.empty() && set.key.function != o.fn) continue;
        for (const auto& inv : set.invariants) {
            if (o.pattern == "inference" && !inv.inferred) continue;
            if (!o.pattern.empty() && o.pattern != "inference" && pattern_name(inv.property.shape) != o.pattern) continue;
            std::string prov = inv.basic && inv.inferred ? "basic+inferred" : inv.inferred ? "inferred" : "basic";
            out << "[" << key << "] " << inv.property.text << "  (support " << inv.support.satisfied << "/"
                << inv.support.applicable << "/" << inv.support.total << ", " << prov << ")\n";
            ++shown;
        }
    }
    out << shown << " invariants\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// entry point

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    std::vector<std::string> args(argv, argv + argc);
    CLI::App app{"Mine likely invariants from contract transaction traces and check new transactions against them"};
    app.set_version_flag("--version", std::string{TXORACLE_VERSION});
    app.require_subcommand(1);

    GenOptions gen;
    auto* g = app.add_subcommand("gen", "Generate a simulated corpus");
    g->add_option("--scenario", gen.scenario, "erc20, vault or whitelist");
    g->add_option("--txs", gen.txs, "Transactions in the mining corpus");
    g->add_option("--holdout", gen.holdout, "Benign transactions generated after the corpus");
    g->add_option("--seed", gen.seed);
    g->add_option("--population", gen.population, "Number of accounts");
    g->add_option("--anomaly-rate", gen.anomaly_rate, "Fraction of perturbed transfers (erc20)");
    g->add_option("--attack", gen.attack, "FakeDeposit, ReentrantDrain or UnauthorizedCall");
    g->add_flag("--rune-only", gen.rune_only, "Vault deposits only take the RUNE branch");
    g->add_option("--out", gen.out, "Output path prefix");

    MineOptions mine;
    std::string threshold, min_applicable;
    size_t min_support = 0, pair_budget = 0;
    bool ordering = false, reverted = false;
    auto* mi = app.add_subcommand("mine", "Mine an invariant store from raw traces");
    mi->add_option("--traces", mine.traces)->required();
    mi->add_option("--abi", mine.abi)->required();
    mi->add_option("--layout", mine.layout)->required();
    mi->add_option("--contract", mine.contract, "Target address (default: most frequent root receiver)");
    mi->add_option("--config", mine.config, "JSON miner config; flags override it");
    mi->add_option("--out", mine.out);
    mi->add_option("--threads", mine.threads);
    auto* o_threshold = mi->add_option("--threshold", threshold);
    auto* o_support = mi->add_option("--min-support", min_support);
    auto* o_applicable = mi->add_option("--min-applicable", min_applicable);
    auto* o_ordering = mi->add_flag("--include-ordering", ordering);
    auto* o_budget = mi->add_option("--pair-budget", pair_budget);
    auto* o_reverted = mi->add_flag("--include-reverted", reverted);

    CheckOptions check;
    auto* ch = app.add_subcommand("check", "Check transactions against a store");
    ch->add_option("--store", check.store)->required();
    ch->add_option("--traces", check.traces)->required();
    ch->add_option("--out", check.out);
    ch->add_option("--threads", check.threads);
    std::string unused_config;
    ch->add_option("--config", unused_config, "Accepted for symmetry; the store carries the config");

    ShowOptions show;
    auto* sh = app.add_subcommand("show", "List stored invariants");
    sh->add_option("--store", show.store)->required();
    sh->add_option("--layer", show.layer, "contract, function or branch");
    sh->add_option("--fn", show.fn, "Function name");
    sh->add_option("--pattern", show.pattern, "comparison, membership, arithmetic, inference or constant");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion& e) {
        out << TXORACLE_VERSION << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (g->parsed()) return cmd_gen(gen, args, out);
        if (mi->parsed()) {
            if (o_threshold->count()) mine.threshold = threshold;
            if (o_support->count()) mine.min_support = min_support;
            if (o_applicable->count()) mine.min_applicable = min_applicable;
            if (o_ordering->count()) mine.include_ordering = ordering;
            if (o_budget->count()) mine.pair_budget = pair_budget;
            if (o_reverted->count()) mine.include_reverted = reverted;
            return cmd_mine(mine, args, out, err);
        }
        if (ch->parsed()) return cmd_check(check, args, out);
        if (sh->parsed()) return cmd_show(show, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace txoracle::cli
