// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <deque>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "trace_view.hpp"

namespace txoracle {

/// Trace variables that may stand in for a concrete mapping key: sender and
/// receiver, parameters, event fields and unkeyed state variables of address
/// or amount class.
class Bindings {
  public:
    explicit Bindings(const TraceView& view) {
        for (const auto& s : view.scalars()) {
            const VarRef& r = *s.ref;
            if (r.cls != VarClass::kAddress && r.cls != VarClass::kAmount) continue;
            bool ok = false;
            switch (r.kind) {
                case VarKind::kTx: ok = r.name == "sender" || r.name == "receiver"; break;
                case VarKind::kFn:
                case VarKind::kEvent: ok = true; break;
                case VarKind::kState: ok = r.keys.empty() && !r.length; break;
                default: break;
            }
            if (!ok || s.value < 0 || s.value >= two_pow_256()) continue;
            by_value_[Word::from_uint(s.value)].push_back(s.ref);
        }
    }

    [[nodiscard]] const std::vector<VarPtr>& matching(const Word& key) const {
        static const std::vector<VarPtr> kNone;
        auto it = by_value_.find(key);
        return it == by_value_.end() ? kNone : it->second;
    }

  private:
    std::unordered_map<Word, std::vector<VarPtr>> by_value_;
};

/// One-step abstractions of `p`: each concrete key occurrence replaced by
/// each binding variable holding that value.
inline std::vector<Property> infer_advanced(const Property& p, const Bindings& bindings) {
    std::vector<Property> out;
    for (size_t vi = 0; vi < p.vars.size(); ++vi) {
        const VarRef& v = *p.vars[vi];
        for (size_t ki = 0; ki < v.keys.size(); ++ki) {
            if (v.keys[ki].is_symbolic()) continue;
            for (const auto& b : bindings.matching(v.keys[ki].concrete)) {
                auto vars = p.vars;
                vars[vi] = with_key(v, ki, {Word{}, b});
                try {
                    out.push_back(with_vars(p, std::move(vars)));
                } catch (const Error&) {
                    // substitution collapsed both sides into the same variable
                }
            }
        }
    }
    return out;
}

inline std::vector<Property> infer_advanced(const Property& p, const TraceView& view) {
    return infer_advanced(p, Bindings{view});
}

struct DerivedProperty {
    Property property;
    Provenance provenance{Provenance::kBasic};
    std::string root;  // text of the basic property it was abstracted from
};

/// Closure of `basic` under infer_advanced, deduplicated by canonical text.
/// Basic entries keep their provenance even when also derivable.
inline std::vector<DerivedProperty> infer_fixpoint(const std::vector<Property>& basic, const TraceView& view) {
    Bindings bindings{view};
    std::vector<DerivedProperty> out;
    std::unordered_map<std::string, size_t> seen;
    std::deque<size_t> work;
    for (const auto& p : basic) {
        if (seen.count(p.text)) continue;
        seen.emplace(p.text, out.size());
        work.push_back(out.size());
        out.push_back({p, Provenance::kBasic, p.text});
    }
    while (!work.empty()) {
        size_t i = work.front();
        work.pop_front();
        if (out[i].property.concrete_key_count() == 0) continue;
        for (auto& q : infer_advanced(out[i].property, bindings)) {
            if (seen.count(q.text)) continue;
            seen.emplace(q.text, out.size());
            work.push_back(out.size());
            out.push_back({std::move(q), Provenance::kInferred, out[i].root});
        }
    }
    return out;
}

}  // namespace txoracle
