// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "miner.hpp"

namespace txoracle {

inline constexpr int kSchemaVersion = 1;

/// Digest of a payload's canonical bytes (sorted keys, compact).
inline std::string payload_digest(const nlohmann::json& payload) { return keccak256(payload.dump()).hex(); }

/// {schema, kind, digest, payload}, pretty-printed with sorted keys.
inline std::string save_envelope(std::string_view kind, const nlohmann::json& payload) {
    nlohmann::json env{{"schema", kSchemaVersion}, {"kind", kind}, {"digest", payload_digest(payload)}, {"payload", payload}};
    return env.dump(1) + "\n";
}

inline nlohmann::json load_envelope(std::string_view text, std::string_view kind) {
    nlohmann::json env;
    try {
        env = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kMalformedArtifact, e.what());
    }
    if (!env.is_object() || !env.contains("schema") || !env.contains("payload"))
        throw Error(ErrorCode::kMalformedArtifact, "missing envelope fields");
    if (!env.at("schema").is_number_integer() || env.at("schema").get<int>() != kSchemaVersion)
        throw Error(ErrorCode::kSchemaUnknown, "unsupported schema " + env.at("schema").dump());
    if (env.value("kind", std::string{}) != kind)
        throw Error(ErrorCode::kMalformedArtifact, "expected a " + std::string{kind} + " artifact");
    if (env.value("digest", std::string{}) != payload_digest(env.at("payload")))
        throw Error(ErrorCode::kDigestMismatch, "payload digest does not verify");
    return env.at("payload");
}

// ---------------------------------------------------------------------------
// invariant store

inline nlohmann::json to_json(const Invariant& inv) {
    auto prov = nlohmann::json::array();
    if (inv.basic) prov.push_back("basic");
    if (inv.inferred) prov.push_back("inferred");
    return {{"property", inv.property.text},
            {"pattern", pattern_name(inv.property.shape)},
            {"provenance", std::move(prov)},
            {"support", {{"satisfied", inv.support.satisfied}, {"applicable", inv.support.applicable}, {"total", inv.support.total}}}};
}

inline Invariant invariant_from_json(const nlohmann::json& j) {
    Invariant inv;
    inv.property = parse_property(j.at("property").get<std::string>());
    for (const auto& p : j.at("provenance")) {
        auto s = p.get<std::string>();
        if (s == "basic") inv.basic = true;
        else if (s == "inferred") inv.inferred = true;
        else throw Error(ErrorCode::kMalformedArtifact, "unknown provenance " + s);
    }
    const auto& s = j.at("support");
    inv.support = {s.at("satisfied").get<size_t>(), s.at("applicable").get<size_t>(), s.at("total").get<size_t>()};
    return inv;
}

inline nlohmann::json to_json(const InvariantSet& set) {
    auto invs = nlohmann::json::array();
    for (const auto& inv : set.invariants) invs.push_back(to_json(inv));
    return {{"layer", to_string(set.key.layer)},
            {"function", set.key.function},
            {"selector", selector_hex(set.key.selector)},
            {"branch", set.key.layer == Layer::kBranch ? set.key.branch.hex() : std::string{}},
            {"groupSize", set.group_size},
            {"groupTooSmall", set.group_too_small},
            {"invariants", std::move(invs)}};
}

inline nlohmann::json store_payload(const InvariantStore& store) {
    nlohmann::json sets = nlohmann::json::object();
    for (const auto& [k, s] : store.sets) sets[k] = to_json(s);
    auto embedded = [](const std::string& text) { return text.empty() ? nlohmann::json(nullptr) : nlohmann::json::parse(text); };
    return {{"contract", address_hex(store.contract)},
            {"config", to_json(store.config)},
            {"corpusDigest", store.corpus_digest},
            {"traceCount", store.trace_count},
            {"abi", embedded(store.abi_json)},
            {"layout", embedded(store.layout_json)},
            {"sets", std::move(sets)}};
}

inline std::string save_store(const InvariantStore& store) { return save_envelope("store", store_payload(store)); }

inline InvariantStore load_store(std::string_view text) {
    auto p = load_envelope(text, "store");
    InvariantStore store;
    try {
        store.contract = parse_word_or_address(p.at("contract").get<std::string>());
        store.config = miner_config_from_json(p.at("config"));
        store.corpus_digest = p.at("corpusDigest").get<std::string>();
        store.trace_count = p.at("traceCount").get<size_t>();
        store.abi_json = p.at("abi").is_null() ? std::string{} : p.at("abi").dump();
        store.layout_json = p.at("layout").is_null() ? std::string{} : p.at("layout").dump();
        for (const auto& [k, s] : p.at("sets").items()) {
            InvariantSet set;
            set.key = LayerKey::parse(k);
            set.group_size = s.at("groupSize").get<size_t>();
            set.group_too_small = s.at("groupTooSmall").get<bool>();
            for (const auto& inv : s.at("invariants")) set.invariants.push_back(invariant_from_json(inv));
            store.sets.emplace(k, std::move(set));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kMalformedArtifact, e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::kMalformedArtifact) throw;
        throw Error(ErrorCode::kMalformedArtifact, e.what());
    }
    return store;
}

// ---------------------------------------------------------------------------
// files

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kMalformedArtifact, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kMalformedArtifact, "cannot write " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

/// Non-empty lines of an NDJSON document.
inline std::vector<std::string> ndjson_lines(std::string_view text) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= text.size()) {
        size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") != std::string_view::npos) out.emplace_back(line);
        start = end + 1;
    }
    return out;
}

inline std::string save_raw_records(const std::vector<RawTxRecord>& records) {
    std::string out;
    for (const auto& r : records) out += to_json(r).dump() + "\n";
    return out;
}

inline std::vector<RawTxRecord> load_raw_records(std::string_view text) {
    std::vector<RawTxRecord> out;
    for (const auto& line : ndjson_lines(text)) out.push_back(parse_raw_record(line));
    return out;
}

inline std::string save_traces(const std::vector<ExecutionTrace>& traces) {
    std::string out;
    for (const auto& t : traces) out += to_json(t).dump() + "\n";
    return out;
}

inline std::vector<ExecutionTrace> load_traces(std::string_view text) {
    std::vector<ExecutionTrace> out;
    for (const auto& line : ndjson_lines(text)) {
        try {
            out.push_back(execution_trace_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::kMalformedArtifact, e.what());
        }
    }
    return out;
}

}  // namespace txoracle
