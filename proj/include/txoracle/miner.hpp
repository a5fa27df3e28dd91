// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "detect.hpp"
#include "inference.hpp"

namespace txoracle {

// ---------------------------------------------------------------------------
// configuration

/// Renders terminating fractions as decimals ("0.98"), others as "n/d".
inline std::string fraction_text(const Rational& r) {
    BigInt num = boost::multiprecision::numerator(r);
    BigInt den = boost::multiprecision::denominator(r);
    BigInt d = den;
    unsigned twos = 0, fives = 0;
    while (d % 2 == 0) d /= 2, ++twos;
    while (d % 5 == 0) d /= 5, ++fives;
    if (d != 1) return to_decimal(num) + "/" + to_decimal(den);
    unsigned digits = std::max(twos, fives);
    if (digits == 0) return to_decimal(num);
    BigInt scaled = num * boost::multiprecision::pow(BigInt{10}, digits) / den;
    bool neg = scaled < 0;
    std::string s = to_decimal(neg ? BigInt{-scaled} : scaled);
    if (s.size() <= digits) s.insert(0, digits - s.size() + 1, '0');
    s.insert(s.size() - digits, ".");
    return (neg ? "-" : "") + s;
}

inline Rational parse_fraction(std::string_view text) {
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return parse_decimal(text);
    BigInt den = parse_integer(text.substr(slash + 1));
    if (den == 0) throw Error(ErrorCode::kMalformedValue, "zero denominator");
    return ratio(parse_integer(text.substr(0, slash)), den);
}

struct MinerConfig {
    Rational threshold{49, 50};
    size_t min_support{5};
    Rational min_applicable_fraction{1, 2};
    bool include_ordering{false};
    size_t pair_budget{20000};
    bool include_reverted{false};

    void validate() const {
        if (threshold <= 0 || threshold > 1) throw Error(ErrorCode::kConfig, "threshold must be in (0,1], got " + fraction_text(threshold));
        if (min_applicable_fraction < 0 || min_applicable_fraction > 1)
            throw Error(ErrorCode::kConfig, "minApplicableFraction must be in [0,1]");
        if (min_support == 0) throw Error(ErrorCode::kConfig, "minSupport must be positive");
        if (pair_budget == 0) throw Error(ErrorCode::kConfig, "pairBudget must be positive");
    }

    [[nodiscard]] DetectOptions detect_options() const { return {include_ordering, pair_budget}; }

    bool operator==(const MinerConfig&) const = default;
};

inline nlohmann::json to_json(const MinerConfig& c) {
    return {{"threshold", fraction_text(c.threshold)},
            {"minSupport", c.min_support},
            {"minApplicableFraction", fraction_text(c.min_applicable_fraction)},
            {"includeOrdering", c.include_ordering},
            {"pairBudget", c.pair_budget},
            {"includeReverted", c.include_reverted}};
}

/// Overlay the fields present in `j` onto `base`.
inline MinerConfig miner_config_from_json(const nlohmann::json& j, MinerConfig base = {}) {
    auto fraction = [](const nlohmann::json& v) {
        if (v.is_string()) return parse_fraction(v.get<std::string>());
        if (v.is_number()) return parse_fraction(v.dump());
        throw Error(ErrorCode::kConfig, "expected a fraction");
    };
    try {
        if (!j.is_object()) throw Error(ErrorCode::kConfig, "config must be a JSON object");
        for (const auto& [k, v] : j.items()) {
            if (k == "threshold") base.threshold = fraction(v);
            else if (k == "minSupport") base.min_support = v.get<size_t>();
            else if (k == "minApplicableFraction") base.min_applicable_fraction = fraction(v);
            else if (k == "includeOrdering") base.include_ordering = v.get<bool>();
            else if (k == "pairBudget") base.pair_budget = v.get<size_t>();
            else if (k == "includeReverted") base.include_reverted = v.get<bool>();
            else throw Error(ErrorCode::kConfig, "unknown config key " + k);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kConfig, e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::kConfig) throw;
        throw Error(ErrorCode::kConfig, e.what());
    }
    return base;
}

// ---------------------------------------------------------------------------
// layers

enum class Layer : uint8_t { kContract, kFunction, kBranch };

inline std::string_view to_string(Layer l) {
    switch (l) {
        case Layer::kContract: return "contract";
        case Layer::kFunction: return "function";
        case Layer::kBranch: return "branch";
    }
    return "?";
}

struct LayerKey {
    Layer layer{Layer::kContract};
    std::string function;
    uint32_t selector{0};
    Word branch;

    static LayerKey contract() { return {}; }
    static LayerKey of_function(const ExecutionTrace& t) { return {Layer::kFunction, t.function, t.selector, {}}; }
    static LayerKey of_branch(const ExecutionTrace& t) { return {Layer::kBranch, t.function, t.selector, t.branch}; }

    /// "contract", "function:<name>:<selector>", "branch:<name>:<selector>:<digest>".
    [[nodiscard]] std::string str() const {
        switch (layer) {
            case Layer::kContract: return "contract";
            case Layer::kFunction: return "function:" + function + ":" + selector_hex(selector);
            case Layer::kBranch: return "branch:" + function + ":" + selector_hex(selector) + ":" + branch.hex();
        }
        return {};
    }

    static LayerKey parse(std::string_view s) {
        auto fail = [&] { return Error(ErrorCode::kMalformedArtifact, "bad layer key " + std::string{s}); };
        if (s == "contract") return contract();
        std::vector<std::string> parts;
        size_t start = 0;
        for (size_t i = 0; i <= s.size(); ++i) {
            if (i == s.size() || s[i] == ':') {
                parts.emplace_back(s.substr(start, i - start));
                start = i + 1;
            }
        }
        LayerKey k;
        if (parts.size() == 3 && parts[0] == "function") k.layer = Layer::kFunction;
        else if (parts.size() == 4 && parts[0] == "branch") k.layer = Layer::kBranch;
        else throw fail();
        k.function = parts[1];
        k.selector = static_cast<uint32_t>(Word::from_hex(parts[2]).to_uint());
        if (k.layer == Layer::kBranch) k.branch = Word::from_hex(parts[3]);
        return k;
    }

    auto operator<=>(const LayerKey&) const = default;
    bool operator==(const LayerKey&) const = default;
};

struct LayerGroup {
    LayerKey key;
    std::vector<const ExecutionTrace*> traces;
};

inline bool trace_order(const ExecutionTrace& a, const ExecutionTrace& b) {
    return std::tie(a.tx.block, a.tx.timestamp, a.tx.tx_hash, a.subtree) < std::tie(b.tx.block, b.tx.timestamp, b.tx.tx_hash, b.subtree);
}

/// Contract group first, then function groups, then branch groups, each
/// holding its traces in (block, timestamp, txHash, subtree) order.
inline std::vector<LayerGroup> group_traces(const std::vector<ExecutionTrace>& traces, bool include_reverted = false) {
    std::vector<const ExecutionTrace*> kept;
    for (const auto& t : traces)
        if (include_reverted || !t.reverted) kept.push_back(&t);
    std::vector<LayerGroup> out;
    if (kept.empty()) return out;
    std::sort(kept.begin(), kept.end(), [](const auto* a, const auto* b) { return trace_order(*a, *b); });
    std::map<LayerKey, std::vector<const ExecutionTrace*>> fns, branches;
    for (const auto* t : kept) {
        fns[LayerKey::of_function(*t)].push_back(t);
        branches[LayerKey::of_branch(*t)].push_back(t);
    }
    out.push_back({LayerKey::contract(), kept});
    for (auto& [k, v] : fns) out.push_back({k, std::move(v)});
    for (auto& [k, v] : branches) out.push_back({k, std::move(v)});
    return out;
}

// ---------------------------------------------------------------------------
// invariants

struct Support {
    size_t satisfied{0};
    size_t applicable{0};
    size_t total{0};
    bool operator==(const Support&) const = default;
};

struct Invariant {
    Property property;
    Support support;
    bool basic{false};
    bool inferred{false};
    std::vector<std::string> roots;  // basic properties an inferred one was abstracted from

    bool operator==(const Invariant& o) const {
        return property.text == o.property.text && support == o.support && basic == o.basic && inferred == o.inferred;
    }
};

struct InvariantSet {
    LayerKey key;
    size_t group_size{0};
    bool group_too_small{false};
    std::vector<Invariant> invariants;

    bool operator==(const InvariantSet&) const = default;
};

/// Applicable traces required in a group of `group_size`.
inline size_t min_applicable(size_t group_size, const MinerConfig& cfg) {
    Rational need = cfg.min_applicable_fraction * Rational{BigInt{group_size}};
    BigInt n = boost::multiprecision::numerator(need), d = boost::multiprecision::denominator(need);
    BigInt ceil = (n + d - 1) / d;
    return std::max(cfg.min_support, static_cast<size_t>(ceil));
}

/// Exact filter: satisfied >= threshold * applicable and enough applicable traces.
inline bool passes_filter(const Support& s, const MinerConfig& cfg) {
    BigInt num = boost::multiprecision::numerator(cfg.threshold);
    BigInt den = boost::multiprecision::denominator(cfg.threshold);
    return BigInt{s.satisfied} * den >= num * BigInt{s.applicable} && s.applicable >= min_applicable(s.total, cfg);
}


// ---------------------------------------------------------------------------
// arithmetic seeding

namespace detail {

    /// Variable identity ignoring record points, so x@Pre, x@Post and
    /// delta(x) all collide.
    inline std::string var_identity(const VarRef& v) {
        VarRef copy = v;
        switch (v.kind) {
            case VarKind::kDelta: copy.kind = v.base; [[fallthrough]];
            case VarKind::kState:
            case VarKind::kToken:
            case VarKind::kSum: {
                copy.point = RecordPoint::pre_call();
                auto text = render(copy);
                if (v.length) text = "len:" + text;
                return text.substr(0, text.rfind('@'));
            }
            default: return v.text;
        }
    }

    struct SeedVar {
        VarPtr ref;
        std::string identity;
        std::vector<std::optional<BigInt>> values;  // per group trace
    };

    inline bool distinct_identities(std::initializer_list<const SeedVar*> vs) {
        std::set<std::string> ids;
        for (const auto* v : vs)
            if (!ids.insert(v->identity).second) return false;
        return true;
    }

    /// First `n` distinct value tuples of `vars`, in trace order.
    inline std::vector<std::vector<BigInt>> seed_samples(const std::vector<const SeedVar*>& vars, size_t n) {
        std::vector<std::vector<BigInt>> out;
        size_t traces = vars.front()->values.size();
        for (size_t t = 0; t < traces && out.size() < n; ++t) {
            std::vector<BigInt> row;
            for (const auto* v : vars) {
                if (!v->values[t]) break;
                row.push_back(*v->values[t]);
            }
            if (row.size() != vars.size()) continue;
            if (std::find(out.begin(), out.end(), row) == out.end()) out.push_back(std::move(row));
        }
        return out;
    }

    inline BigInt lcm_den(const std::vector<Rational>& rs) {
        BigInt l = 1;
        for (const auto& r : rs) {
            BigInt d = boost::multiprecision::denominator(r);
            l = l / boost::multiprecision::gcd(l, d) * d;
        }
        return l;
    }

    inline Rational det3(const Rational m[3][3]) {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    }

}  // namespace detail

/// Linear (y = ax + b, z = ax + by + c) and constant-product candidates
/// solved exactly from the first distinct samples of the group and confirmed
/// on one more. `group` must be in canonical trace order.
inline std::vector<Property> seed_arithmetic(const std::vector<const TraceView*>& group, const MinerConfig& cfg) {
    std::vector<Property> out;
    if (group.size() < 3) return out;
    size_t need = min_applicable(group.size(), cfg);

    std::map<std::string, detail::SeedVar> by_text;
    for (size_t t = 0; t < group.size(); ++t) {
        for (const auto& s : group[t]->scalars()) {
            if (s.ref->cls != VarClass::kAmount) continue;
            auto [it, fresh] = by_text.try_emplace(s.ref->text);
            if (fresh) {
                it->second.ref = s.ref;
                it->second.identity = detail::var_identity(*s.ref);
                it->second.values.resize(group.size());
            }
            it->second.values[t] = s.value;
        }
    }
    std::vector<const detail::SeedVar*> vars;
    for (const auto& [_, v] : by_text) {
        size_t present = std::count_if(v.values.begin(), v.values.end(), [](const auto& x) { return x.has_value(); });
        if (present >= need) vars.push_back(&v);
    }
    std::sort(vars.begin(), vars.end(), [](const auto* a, const auto* b) { return var_less(*a->ref, *b->ref); });

    for (size_t i = 0; i < vars.size(); ++i) {
        for (size_t j = i + 1; j < vars.size(); ++j) {
            const auto* x = vars[i];
            const auto* y = vars[j];
            if (!detail::distinct_identities({x, y})) continue;
            auto s = detail::seed_samples({x, y}, 3);
            if (s.size() < 3) continue;
            bool x_const = s[0][0] == s[1][0] && s[1][0] == s[2][0];
            bool y_const = s[0][1] == s[1][1] && s[1][1] == s[2][1];
            if (x_const || y_const) continue;

            // y = a x + b
            size_t second = s[1][0] != s[0][0] ? 1 : 2;
            Rational a = ratio(s[second][1] - s[0][1], s[second][0] - s[0][0]);
            Rational b = Rational{s[0][1]} - a * Rational{s[0][0]};
            bool holds = true;
            for (const auto& row : s) holds = holds && Rational{row[1]} == a * Rational{row[0]} + b;
            bool trivial = b == 0 && (a == 1 || a == -1);
            if (holds && a != 0 && !trivial) {
                BigInt l = detail::lcm_den({a, b});
                Rational la = a * Rational{l}, lb = b * Rational{l};
                out.push_back(make_linear({x->ref, y->ref}, {-boost::multiprecision::numerator(la), l},
                                          boost::multiprecision::numerator(lb)));
            }

            // x * y = c
            BigInt c = s[0][0] * s[0][1];
            if (c != 0 && s[1][0] * s[1][1] == c && s[2][0] * s[2][1] == c) out.push_back(make_quadratic(x->ref, y->ref, c));
        }
    }

    size_t budget = cfg.pair_budget;
    for (size_t i = 0; i < vars.size() && budget; ++i) {
        for (size_t j = i + 1; j < vars.size() && budget; ++j) {
            for (size_t k = j + 1; k < vars.size() && budget; ++k) {
                const auto *x = vars[i], *y = vars[j], *z = vars[k];
                if (!detail::distinct_identities({x, y, z})) continue;
                --budget;
                auto s = detail::seed_samples({x, y, z}, 4);
                if (s.size() < 4) continue;
                // z = a x + b y + c from the first three samples
                Rational m[3][3], r[3];
                for (int row = 0; row < 3; ++row) {
                    m[row][0] = Rational{s[row][0]};
                    m[row][1] = Rational{s[row][1]};
                    m[row][2] = 1;
                    r[row] = Rational{s[row][2]};
                }
                Rational det = detail::det3(m);
                if (det == 0) continue;
                Rational coef[3];
                for (int col = 0; col < 3; ++col) {
                    Rational mc[3][3];
                    for (int row = 0; row < 3; ++row)
                        for (int cc = 0; cc < 3; ++cc) mc[row][cc] = cc == col ? r[row] : m[row][cc];
                    coef[col] = detail::det3(mc) / det;
                }
                if (coef[0] == 0 || coef[1] == 0) continue;
                if (Rational{s[3][2]} != coef[0] * Rational{s[3][0]} + coef[1] * Rational{s[3][1]} + coef[2]) continue;
                BigInt l = detail::lcm_den({coef[0], coef[1], coef[2]});
                auto scaled = [&](const Rational& q) { return BigInt{boost::multiprecision::numerator(q * Rational{l})}; };
                out.push_back(make_linear({x->ref, y->ref, z->ref}, {-scaled(coef[0]), -scaled(coef[1]), l}, scaled(coef[2])));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// redundancy

/// `same_on_group(child, parent)` reports whether two invariants have the
/// same status on every trace of the group; without it the inferred-vs-parent
/// rule is skipped.
using SubsumptionCheck = std::function<bool(const Invariant& child, const Invariant& parent)>;

inline std::vector<Invariant> remove_redundant(std::vector<Invariant> candidates, const SubsumptionCheck& same_on_group = {}) {
    // structural duplicates
    std::map<std::string, Invariant> unique;
    for (auto& c : candidates) {
        auto [it, fresh] = unique.try_emplace(c.property.text, c);
        if (fresh) continue;
        it->second.basic |= c.basic;
        it->second.inferred |= c.inferred;
        for (auto& r : c.roots)
            if (std::find(it->second.roots.begin(), it->second.roots.end(), r) == it->second.roots.end()) it->second.roots.push_back(r);
    }

    // inferred properties indistinguishable from a surviving concrete parent
    std::set<std::string> dropped;
    if (same_on_group) {
        for (const auto& [text, inv] : unique) {
            if (inv.basic || !inv.inferred) continue;
            for (const auto& r : inv.roots) {
                auto p = unique.find(r);
                if (p != unique.end() && p->second.property.concrete_key_count() > 0 && same_on_group(inv, p->second)) {
                    dropped.insert(text);
                    break;
                }
            }
        }
    }

    // orderings implied by a surviving equality
    std::set<std::pair<std::string, std::string>> equal_pairs;
    for (const auto& [text, inv] : unique) {
        if (dropped.count(text)) continue;
        const auto& p = inv.property;
        if (p.shape == Shape::kCompare && p.op == CmpOp::kEq) equal_pairs.emplace(p.vars[0]->text, p.vars[1]->text);
    }
    for (const auto& [text, inv] : unique) {
        const auto& p = inv.property;
        if (p.shape == Shape::kCompare && p.op != CmpOp::kEq && equal_pairs.count({p.vars[0]->text, p.vars[1]->text}))
            dropped.insert(text);
    }

    // constants implied through an equality chain: keep the least variable
    std::map<std::string, std::string> parent;
    std::function<std::string(const std::string&)> find = [&](const std::string& x) -> std::string {
        auto it = parent.find(x);
        if (it == parent.end() || it->second == x) return x;
        return it->second = find(it->second);
    };
    for (const auto& [a, b] : equal_pairs) {
        auto ra = find(a), rb = find(b);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
    }
    std::map<std::pair<std::string, std::string>, std::string> keep;  // (component, constant) -> least text
    for (const auto& [text, inv] : unique) {
        const auto& p = inv.property;
        if (p.shape != Shape::kConstEq || dropped.count(text)) continue;
        auto key = std::make_pair(find(p.vars[0]->text), to_decimal(p.constant));
        auto [it, fresh] = keep.try_emplace(key, text);
        if (fresh) continue;
        const auto& cur = unique.at(it->second).property.vars[0]->text;
        if (p.vars[0]->text < cur) {
            dropped.insert(it->second);
            it->second = text;
        } else {
            dropped.insert(text);
        }
    }

    std::vector<Invariant> out;
    for (auto& [text, inv] : unique)
        if (!dropped.count(text)) out.push_back(std::move(inv));
    return out;
}

// ---------------------------------------------------------------------------
// mining

struct GroupResult {
    InvariantSet set;
    std::vector<Invariant> filtered;  // threshold survivors before redundancy removal
};

/// Candidate generation and counting over a fixed corpus. Per-trace
/// detection runs once and is shared by every layer group.
class MiningContext {
  public:
    MiningContext(const std::vector<const ExecutionTrace*>& traces, const MinerConfig& cfg) : cfg_(cfg) {
        cfg_.validate();
        for (const auto* t : traces) {
            auto& slot = per_trace_[t];
            views_.emplace(t, std::make_unique<TraceView>(*t));
            const TraceView& view = *views_.at(t);
            auto closure = infer_fixpoint(detect_basic(view, cfg_.detect_options()), view);
            for (auto& d : closure) slot.push_back(intern(std::move(d.property), d.provenance, d.root));
            std::sort(slot.begin(), slot.end());
        }
    }

    [[nodiscard]] const MinerConfig& config() const { return cfg_; }
    [[nodiscard]] const TraceView& view(const ExecutionTrace* t) const { return *views_.at(t); }

    GroupResult mine(const LayerGroup& group) {
        GroupResult res;
        res.set.key = group.key;
        res.set.group_size = group.traces.size();
        if (group.traces.size() < cfg_.min_support) {
            res.set.group_too_small = true;
            return res;
        }
        std::vector<const TraceView*> views;
        for (const auto* t : group.traces) views.push_back(&view(t));

        std::vector<uint32_t> ids;
        for (const auto* t : group.traces) {
            const auto& s = per_trace_.at(t);
            ids.insert(ids.end(), s.begin(), s.end());
        }
        for (auto& p : seed_arithmetic(views, cfg_)) ids.push_back(intern(std::move(p), Provenance::kBasic, {}));
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

        const size_t n = views.size();
        const size_t need = min_applicable(n, cfg_);
        const BigInt num = boost::multiprecision::numerator(cfg_.threshold);
        const BigInt den = boost::multiprecision::denominator(cfg_.threshold);
        std::vector<const Candidate*> order;
        for (uint32_t id : ids) order.push_back(&table_[id]);
        std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) { return a->property.text < b->property.text; });
        for (const Candidate* c : order) {
            Support s{0, 0, n};
            size_t violated = 0, inapplicable = 0;
            bool hopeless = false;
            for (const TraceView* v : views) {
                switch (evaluate(c->property, *v)) {
                    case Status::kSatisfied: ++s.satisfied; break;
                    case Status::kViolated: ++violated; break;
                    case Status::kInapplicable: ++inapplicable; break;
                }
                // satisfied can grow to at most n - violated - inapplicable
                if (inapplicable > n - need || BigInt{violated} * num > BigInt{n - violated - inapplicable} * (den - num)) {
                    hopeless = true;
                    break;
                }
            }
            if (hopeless) continue;
            s.applicable = s.satisfied + violated;
            if (!passes_filter(s, cfg_)) continue;
            res.filtered.push_back({c->property, s, c->basic, c->inferred, {c->roots.begin(), c->roots.end()}});
        }

        auto same_on_group = [&](const Invariant& a, const Invariant& b) {
            for (const TraceView* v : views)
                if (evaluate(a.property, *v) != evaluate(b.property, *v)) return false;
            return true;
        };
        res.set.invariants = remove_redundant(res.filtered, same_on_group);
        return res;
    }

  private:
    struct Candidate {
        Property property;
        bool basic{false};
        bool inferred{false};
        std::set<std::string> roots;
    };

    uint32_t intern(Property p, Provenance prov, const std::string& root) {
        auto [it, fresh] = index_.try_emplace(p.text, static_cast<uint32_t>(table_.size()));
        if (fresh) table_.push_back({std::move(p), false, false, {}});
        Candidate& c = table_[it->second];
        if (prov == Provenance::kBasic) c.basic = true;
        else {
            c.inferred = true;
            c.roots.insert(root);
        }
        return it->second;
    }

    MinerConfig cfg_;
    std::vector<Candidate> table_;
    std::unordered_map<std::string, uint32_t> index_;
    std::map<const ExecutionTrace*, std::vector<uint32_t>> per_trace_;
    std::map<const ExecutionTrace*, std::unique_ptr<TraceView>> views_;
};

inline GroupResult mine_group(const LayerGroup& group, const MinerConfig& cfg) {
    MiningContext ctx{group.traces, cfg};
    return ctx.mine(group);
}

/// keccak over the sorted per-trace digests: independent of trace order.
inline std::string corpus_digest(const std::vector<ExecutionTrace>& traces) {
    std::vector<Word> digests;
    for (const auto& t : traces) digests.push_back(keccak256(to_json(t).dump()));
    std::sort(digests.begin(), digests.end());
    Bytes buf;
    for (const auto& d : digests) buf.insert(buf.end(), d.bytes.begin(), d.bytes.end());
    return keccak256(std::span<const uint8_t>{buf}).hex();
}

struct InvariantStore {
    Word contract;
    MinerConfig config;
    std::string corpus_digest;
    size_t trace_count{0};
    std::string abi_json;
    std::string layout_json;
    std::map<std::string, InvariantSet> sets;  // by LayerKey::str()

    [[nodiscard]] size_t invariant_count() const {
        size_t n = 0;
        for (const auto& [_, s] : sets) n += s.invariants.size();
        return n;
    }

    bool operator==(const InvariantStore&) const = default;
};

struct MineResult {
    InvariantStore store;
    std::map<std::string, std::vector<Invariant>> filtered;  // pre-redundancy, by layer key
};

inline MineResult mine_contract_detailed(const std::vector<ExecutionTrace>& traces, const ContractMeta& meta, const MinerConfig& cfg) {
    cfg.validate();
    MineResult out;
    out.store.contract = meta.address;
    out.store.config = cfg;
    out.store.abi_json = meta.abi_json.empty() ? std::string{} : nlohmann::json::parse(meta.abi_json).dump();
    out.store.layout_json = meta.layout_json.empty() ? std::string{} : nlohmann::json::parse(meta.layout_json).dump();
    std::vector<ExecutionTrace> own;
    for (const auto& t : traces)
        if (t.contract == meta.address) own.push_back(t);
    out.store.corpus_digest = corpus_digest(own);
    auto groups = group_traces(own, cfg.include_reverted);
    out.store.trace_count = groups.empty() ? 0 : groups.front().traces.size();
    out.store.sets["contract"] = InvariantSet{LayerKey::contract(), 0, cfg.min_support > 0, {}};
    if (groups.empty()) return out;
    MiningContext ctx{groups.front().traces, cfg};
    for (const auto& g : groups) {
        auto r = ctx.mine(g);
        out.filtered[g.key.str()] = std::move(r.filtered);
        out.store.sets[g.key.str()] = std::move(r.set);
    }
    return out;
}

inline InvariantStore mine_contract(const std::vector<ExecutionTrace>& traces, const ContractMeta& meta, const MinerConfig& cfg) {
    return mine_contract_detailed(traces, meta, cfg).store;
}

}  // namespace txoracle
