// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "persistence.hpp"

namespace txoracle {

struct Violation {
    std::string property;
    std::map<std::string, std::string> bindings;  // variable -> observed value
    std::string expected;                        // the relation instantiated with observed values

    bool operator==(const Violation&) const = default;
};

struct SubtreeReport {
    uint32_t subtree{0};
    std::string layer;  // LayerKey::str() of the set used
    std::vector<Violation> violations;
    size_t checked{0};
    size_t inapplicable{0};

    bool operator==(const SubtreeReport&) const = default;
};

/// One report per input transaction, one entry per relevant subtree.
struct ViolationReport {
    size_t position{0};
    std::string tx_hash;
    std::vector<SubtreeReport> subtrees;
    std::optional<std::string> error;
    double millis{0};

    [[nodiscard]] size_t violation_count() const {
        size_t n = 0;
        for (const auto& s : subtrees) n += s.violations.size();
        return n;
    }
};

/// Most fine-grained non-empty set: branch, then function, then contract.
inline std::pair<LayerKey, const InvariantSet*> select_invariant_set(const InvariantStore& store, const ExecutionTrace& trace) {
    if (trace.contract != store.contract) throw Error(ErrorCode::kNoStore, "no store for contract " + address_hex(trace.contract));
    for (const auto& key : {LayerKey::of_branch(trace), LayerKey::of_function(trace)}) {
        auto it = store.sets.find(key.str());
        if (it != store.sets.end() && !it->second.invariants.empty()) return {key, &it->second};
    }
    auto it = store.sets.find("contract");
    static const InvariantSet kEmpty{};
    return {LayerKey::contract(), it == store.sets.end() ? &kEmpty : &it->second};
}

namespace detail {

    inline std::string render_value(const BigInt& x, VarClass cls) {
        if (x < 0 || x >= two_pow_256()) return to_decimal(x);
        if (cls == VarClass::kAddress) return address_hex(Word::from_uint(x));
        if (cls == VarClass::kBytes || cls == VarClass::kRaw) return Word::from_uint(x).short_hex();
        return to_decimal(x);
    }

    inline VarClass observed_class(const TraceView& view, const VarRef& v) {
        const ScalarVar* s = view.find_scalar(v.has_symbolic_key() ? view.concrete_text(v) : v.text);
        return s ? s->ref->cls : v.cls;
    }

    /// Array elements take `element_cls`, the class of the value tested for membership.
    inline std::string observed(const TraceView& view, const VarRef& v, VarClass element_cls = VarClass::kUnknown) {
        if (v.array) {
            const ArrayVar* a = view.array(v);
            if (!a) return "absent";
            std::string s = "[";
            bool first = true;
            for (const auto& [field, values] : a->fields)
                for (const auto& x : values) {
                    s += (first ? "" : ",") + (field.empty() ? "" : field + ":") + render_value(x, element_cls);
                    first = false;
                }
            return s + "]";
        }
        auto x = view.value(v);
        return x ? render_value(*x, observed_class(view, v)) : std::string{"absent"};
    }

    inline std::string expected_relation(const Property& p, const TraceView& view) {
        auto val = [&](size_t i) { return observed(view, *p.vars[i]); };
        switch (p.shape) {
            case Shape::kCompare: return val(0) + " " + std::string{to_string(p.op)} + " " + val(1);
            case Shape::kNegation: return val(0) + " == -(" + val(1) + ")";
            case Shape::kConstEq: return val(0) + " == " + to_decimal(p.constant);
            case Shape::kMembership:
                return val(0) + " in " + observed(view, *p.vars[1], observed_class(view, *p.vars[0]));
            case Shape::kLinear: {
                std::string s;
                for (size_t i = 0; i < p.vars.size(); ++i) s += (i ? " + " : "") + to_decimal(p.coeffs[i]) + "*" + val(i);
                return s + " == " + to_decimal(p.constant);
            }
            case Shape::kQuadratic: return val(0) + " * " + val(1) + " == " + to_decimal(p.constant);
        }
        return {};
    }

}  // namespace detail

inline SubtreeReport check_trace(const ExecutionTrace& trace, const InvariantSet& set, const std::string& layer = {}) {
    TraceView view{trace};
    SubtreeReport r;
    r.subtree = trace.subtree;
    r.layer = layer.empty() ? set.key.str() : layer;
    for (const auto& inv : set.invariants) {
        switch (evaluate(inv.property, view)) {
            case Status::kSatisfied: ++r.checked; break;
            case Status::kInapplicable: ++r.inapplicable; break;
            case Status::kViolated: {
                ++r.checked;
                Violation v;
                v.property = inv.property.text;
                for (const auto& var : inv.property.vars) {
                    v.bindings[var->text] = detail::observed(view, *var, detail::observed_class(view, *inv.property.vars[0]));
                    if (var->has_symbolic_key()) v.bindings[var->text + " as"] = view.concrete_text(*var);
                }
                v.expected = detail::expected_relation(inv.property, view);
                r.violations.push_back(std::move(v));
                break;
            }
        }
    }
    return r;
}

/// Check every relevant subtree of one transaction against the store.
inline ViolationReport check_record(const InvariantStore& store, const ContractMeta& meta, const RawTxRecord& record,
                                    size_t position) {
    ViolationReport rep;
    rep.position = position;
    rep.tx_hash = record.header.tx_hash.hex();
    for (const auto& t : extract_traces(record, meta)) {
        if (t.reverted && !store.config.include_reverted) continue;
        auto [key, set] = select_invariant_set(store, t);
        rep.subtrees.push_back(check_trace(t, *set, key.str()));
    }
    return rep;
}

inline ContractMeta meta_of(const InvariantStore& store) {
    return ContractMeta::load(store.contract, store.abi_json.empty() ? "[]" : store.abi_json,
                              store.layout_json.empty() ? R"({"storage":[],"types":{}})" : store.layout_json);
}

/// Parse, extract and check each NDJSON line; a malformed line yields an
/// error entry and the stream continues. Reports keep input order.
inline std::vector<ViolationReport> check_stream(const InvariantStore& store, const std::vector<std::string>& lines,
                                                 unsigned threads = 1) {
    ContractMeta meta = meta_of(store);
    std::vector<ViolationReport> out(lines.size());
    auto work = [&](size_t first, size_t stride) {
        for (size_t i = first; i < lines.size(); i += stride) {
            auto start = std::chrono::steady_clock::now();
            ViolationReport rep;
            try {
                rep = check_record(store, meta, parse_raw_record(lines[i]), i + 1);
            } catch (const Error& e) {
                rep = {};
                rep.position = i + 1;
                rep.error = e.what();
            }
            rep.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            out[i] = std::move(rep);
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<size_t>(1, lines.size()))));
    if (threads == 1) {
        work(0, 1);
        return out;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& t : pool) t.join();
    return out;
}

inline nlohmann::json to_json(const ViolationReport& r) {
    auto subtrees = nlohmann::json::array();
    for (const auto& s : r.subtrees) {
        auto vs = nlohmann::json::array();
        for (const auto& v : s.violations) vs.push_back({{"property", v.property}, {"bindings", v.bindings}, {"expected", v.expected}});
        subtrees.push_back({{"subtree", s.subtree},
                            {"layer", s.layer},
                            {"violations", std::move(vs)},
                            {"checked", s.checked},
                            {"inapplicable", s.inapplicable}});
    }
    nlohmann::json j{{"schema", kSchemaVersion}, {"position", r.position}, {"txHash", r.tx_hash}, {"subtrees", std::move(subtrees)}};
    if (r.error) j["error"] = *r.error;
    return j;
}

/// Human-readable rendering of the violating entries of a report.
inline std::string render_report(const ViolationReport& r) {
    std::string s;
    if (r.error) return "#" + std::to_string(r.position) + " error: " + *r.error + "\n";
    for (const auto& st : r.subtrees) {
        for (const auto& v : st.violations) {
            s += "#" + std::to_string(r.position) + " " + r.tx_hash + " subtree " + std::to_string(st.subtree) + " [" + st.layer +
                 "]\n  violated: " + v.property + "\n  observed: " + v.expected + "\n";
        }
    }
    return s;
}

}  // namespace txoracle
