// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "property.hpp"
#include "trace.hpp"

namespace txoracle {

enum class Status : uint8_t { kSatisfied, kViolated, kInapplicable };

inline std::string_view to_string(Status s) {
    switch (s) {
        case Status::kSatisfied: return "Satisfied";
        case Status::kViolated: return "Violated";
        case Status::kInapplicable: return "Inapplicable";
    }
    return "?";
}

inline VarClass class_of(const TypedValue& v) {
    switch (v.tag) {
        case ValueTag::kAddress: return VarClass::kAddress;
        case ValueTag::kUnsigned:
        case ValueTag::kSigned: return VarClass::kAmount;
        case ValueTag::kBool: return VarClass::kBool;
        case ValueTag::kFixedBytes: return VarClass::kBytes;
        default: return VarClass::kUnknown;
    }
}

struct ScalarVar {
    VarPtr ref;
    BigInt value;
};

/// Observed elements of an array variable, per struct member ("" for plain elements).
struct ArrayVar {
    VarPtr ref;
    std::map<std::string, std::vector<BigInt>> fields;
};

/// Flattened, indexed view of one execution trace: every concrete variable
/// with its exact numeric value, including synthetic sums and deltas.
class TraceView {
  public:
    explicit TraceView(const ExecutionTrace& trace) : trace_(&trace) {
        add_scalar(make_tx_var("sender"), trace.tx.sender.to_uint());
        add_scalar(make_tx_var("receiver"), trace.tx.receiver.to_uint());
        add_scalar(make_tx_var("block"), BigInt{trace.tx.block});
        add_scalar(make_tx_var("timestamp"), BigInt{trace.tx.timestamp});
        add_scalar(make_tx_var("value"), trace.tx.value);
        for (const auto& [name, v] : trace.params)
            add_value(v, [&](VarClass cls, bool array) { return make_fn_var(name, cls, array); });
        for (const auto& log : trace.logs)
            for (const auto& [name, v] : log.params)
                add_value(v, [&](VarClass cls, bool array) { return make_event_var(log.name, log.occurrence, name, cls, array); });

        for (const auto& [point, snap] : trace.snapshots) {
            std::map<std::string, std::pair<size_t, BigInt>> sums;
            for (const auto& [id, v] : snap.vars) {
                auto n = v.numeric();
                if (!n) continue;
                bool anonymous = id.label == kAnonymousSlotLabel;
                VarClass cls = anonymous ? VarClass::kRaw : class_of(v);
                add_scalar(make_state_var(id.label, concrete_keys(id.keys), id.member, point, cls), *n);
                if (!anonymous && id.keys.size() == 1 && id.member.empty() && v.tag == ValueTag::kUnsigned) {
                    auto& s = sums[id.label];
                    ++s.first;
                    s.second += *n;
                }
            }
            for (const auto& [label, s] : sums)
                if (s.first >= 2) add_scalar(make_sum_var(label, point), s.second);
            for (const auto& [id, obs] : snap.arrays) {
                if (obs.length) add_scalar(make_length_var(id.label, concrete_keys(id.keys), point), *obs.length);
                ArrayVar a{make_state_var(id.label, concrete_keys(id.keys), {}, point, VarClass::kUnknown, true), {}};
                for (const auto& [idx, members] : obs.elements)
                    for (const auto& [m, v] : members)
                        if (auto n = v.numeric()) a.fields[m].push_back(*n);
                add_array(std::move(a));
            }
            for (const auto& [k, amount] : snap.tokens)
                add_scalar(make_token_var({k.first, nullptr}, {k.second, nullptr}, point), amount);
        }

        for (const auto& [point, pre] : trace.snapshots) {
            if (point.kind != RecordPoint::Kind::kPreCall && point.kind != RecordPoint::Kind::kPreSubCall) continue;
            auto it = trace.snapshots.find(point.partner());
            if (it == trace.snapshots.end()) continue;
            const Snapshot& post = it->second;
            for (const auto& [id, v] : pre.vars) {
                if (id.label == kAnonymousSlotLabel || class_of(v) != VarClass::kAmount) continue;
                auto q = post.vars.find(id);
                if (q == post.vars.end()) continue;
                VarRef base;
                base.kind = VarKind::kState;
                base.name = id.label;
                base.keys = concrete_keys(id.keys);
                base.member = id.member;
                add_scalar(make_delta_var(base, point, point.partner()), q->second.number - v.number);
            }
            for (const auto& [k, amount] : pre.tokens) {
                auto q = post.tokens.find(k);
                if (q == post.tokens.end()) continue;
                VarRef base;
                base.kind = VarKind::kToken;
                base.keys = concrete_keys({k.first, k.second});
                add_scalar(make_delta_var(base, point, point.partner()), q->second - amount);
            }
        }

        std::sort(scalars_.begin(), scalars_.end(), [](const ScalarVar& a, const ScalarVar& b) { return var_less(*a.ref, *b.ref); });
        std::sort(arrays_.begin(), arrays_.end(), [](const ArrayVar& a, const ArrayVar& b) { return var_less(*a.ref, *b.ref); });
        for (size_t i = 0; i < scalars_.size(); ++i) scalar_index_[scalars_[i].ref->text] = i;
        for (size_t i = 0; i < arrays_.size(); ++i) array_index_[arrays_[i].ref->text] = i;
    }

    [[nodiscard]] const ExecutionTrace& trace() const { return *trace_; }
    [[nodiscard]] const std::vector<ScalarVar>& scalars() const { return scalars_; }
    [[nodiscard]] const std::vector<ArrayVar>& arrays() const { return arrays_; }

    [[nodiscard]] const ScalarVar* find_scalar(const std::string& text) const {
        auto it = scalar_index_.find(text);
        return it == scalar_index_.end() ? nullptr : &scalars_[it->second];
    }

    /// Resolve a possibly symbolic reference to its exact value; absent if
    /// the variable (or any key it depends on) was not observed.
    [[nodiscard]] std::optional<BigInt> value(const VarRef& v) const {
        if (v.array) return std::nullopt;
        const ScalarVar* s = v.has_symbolic_key() ? find_scalar(concrete_text(v)) : find_scalar(v.text);
        if (!s) return std::nullopt;
        return s->value;
    }

    [[nodiscard]] const ArrayVar* array(const VarRef& v) const {
        auto it = array_index_.find(v.has_symbolic_key() ? concrete_text(v) : v.text);
        return it == array_index_.end() ? nullptr : &arrays_[it->second];
    }

    /// Text of `v` with every symbolic key replaced by its value here.
    [[nodiscard]] std::string concrete_text(const VarRef& v) const {
        return detail::render_var(v, [&](const Key& k) -> std::optional<std::string> {
            if (!k.is_symbolic()) return k.concrete.short_hex();
            auto val = value(*k.symbolic);
            if (!val || *val < 0 || *val >= two_pow_256()) return std::nullopt;
            return Word::from_uint(*val).short_hex();
        });
    }

  private:
    template <typename Make>
    void add_value(const TypedValue& v, Make&& make) {
        if (v.is_scalar()) {
            if (auto n = v.numeric()) add_scalar(make(class_of(v), false), *n);
            return;
        }
        if (v.tag != ValueTag::kArray) return;
        ArrayVar a{make(VarClass::kUnknown, true), {}};
        for (const auto& item : v.items) {
            if (item.tag == ValueTag::kStruct) {
                for (size_t i = 0; i < item.items.size(); ++i)
                    if (auto n = item.items[i].numeric()) a.fields[item.member_names[i]].push_back(*n);
            } else if (auto n = item.numeric()) {
                a.fields[""].push_back(*n);
            }
        }
        add_array(std::move(a));
    }

    void add_scalar(VarPtr ref, BigInt value) { scalars_.push_back({std::move(ref), std::move(value)}); }
    void add_array(ArrayVar a) { arrays_.push_back(std::move(a)); }

    const ExecutionTrace* trace_;
    std::vector<ScalarVar> scalars_;
    std::vector<ArrayVar> arrays_;
    std::unordered_map<std::string, size_t> scalar_index_;
    std::unordered_map<std::string, size_t> array_index_;
};

inline std::optional<BigInt> numeric_view(const ExecutionTrace& trace, const VarRef& ref) { return TraceView{trace}.value(ref); }

inline Status evaluate(const Property& p, const TraceView& view) {
    auto sat = [](bool ok) { return ok ? Status::kSatisfied : Status::kViolated; };
    switch (p.shape) {
        case Shape::kCompare:
        case Shape::kNegation: {
            auto a = view.value(*p.vars[0]);
            if (!a) return Status::kInapplicable;
            auto b = view.value(*p.vars[1]);
            if (!b) return Status::kInapplicable;
            if (p.shape == Shape::kNegation) return sat(*a == -*b);
            switch (p.op) {
                case CmpOp::kEq: return sat(*a == *b);
                case CmpOp::kLe: return sat(*a <= *b);
                case CmpOp::kGe: return sat(*a >= *b);
            }
            return Status::kInapplicable;
        }
        case Shape::kConstEq: {
            auto a = view.value(*p.vars[0]);
            if (!a) return Status::kInapplicable;
            return sat(*a == p.constant);
        }
        case Shape::kMembership: {
            auto x = view.value(*p.vars[0]);
            if (!x) return Status::kInapplicable;
            const ArrayVar* arr = view.array(*p.vars[1]);
            if (!arr) return Status::kInapplicable;
            auto it = arr->fields.find(p.field);
            if (it == arr->fields.end()) return Status::kViolated;
            return sat(std::find(it->second.begin(), it->second.end(), *x) != it->second.end());
        }
        case Shape::kLinear: {
            BigInt total;
            for (size_t i = 0; i < p.vars.size(); ++i) {
                auto v = view.value(*p.vars[i]);
                if (!v) return Status::kInapplicable;
                total += p.coeffs[i] * *v;
            }
            return sat(total == p.constant);
        }
        case Shape::kQuadratic: {
            auto x = view.value(*p.vars[0]);
            if (!x) return Status::kInapplicable;
            auto y = view.value(*p.vars[1]);
            if (!y) return Status::kInapplicable;
            return sat(*x * *y == p.constant);
        }
    }
    return Status::kInapplicable;
}

inline Status evaluate(const Property& p, const ExecutionTrace& trace) { return evaluate(p, TraceView{trace}); }

}  // namespace txoracle
