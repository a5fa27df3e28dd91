// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "trace_view.hpp"

namespace txoracle {

struct DetectOptions {
    bool include_ordering{false};
    size_t pair_budget{20000};
};

inline bool hex_class(VarClass c) { return c == VarClass::kAddress || c == VarClass::kRaw || c == VarClass::kBytes; }

/// Pairwise relations and constants holding in one trace. Pairs are visited
/// in canonical variable order (entry and delta variables first) until the
/// pair budget is spent.
inline std::vector<Property> detect_comparison(const TraceView& view, const DetectOptions& opt = {}) {
    std::vector<Property> out;
    const auto& vars = view.scalars();
    for (const auto& v : vars) out.push_back(make_const_eq(v.ref, v.value, hex_class(v.ref->cls)));
    size_t pairs = 0;
    for (size_t i = 0; i < vars.size() && pairs < opt.pair_budget; ++i) {
        const auto& a = vars[i];
        for (size_t j = i + 1; j < vars.size() && pairs < opt.pair_budget; ++j) {
            const auto& b = vars[j];
            if (!comparable(a.ref->cls, b.ref->cls)) continue;
            ++pairs;
            if (a.value == b.value) out.push_back(make_compare(a.ref, CmpOp::kEq, b.ref));
            if (opt.include_ordering && a.ref->cls == b.ref->cls && orderable(a.ref->cls)) {
                if (a.value <= b.value) out.push_back(make_compare(a.ref, CmpOp::kLe, b.ref));
                if (a.value >= b.value) out.push_back(make_compare(a.ref, CmpOp::kGe, b.ref));
            }
            if (a.ref->cls == VarClass::kAmount && b.ref->cls == VarClass::kAmount && a.value != 0 && a.value == -b.value)
                out.push_back(make_negation(a.ref, b.ref));
        }
    }
    return out;
}

/// Scalars equal to an element (or an element's struct member) of an array.
inline std::vector<Property> detect_membership(const TraceView& view) {
    std::vector<Property> out;
    for (const auto& arr : view.arrays()) {
        for (const auto& [field, values] : arr.fields) {
            if (values.empty()) continue;
            std::vector<BigInt> sorted = values;
            std::sort(sorted.begin(), sorted.end());
            for (const auto& x : view.scalars()) {
                if (x.ref->cls == VarClass::kBool) continue;
                if (std::binary_search(sorted.begin(), sorted.end(), x.value)) out.push_back(make_membership(x.ref, arr.ref, field));
            }
        }
    }
    return out;
}

inline std::vector<Property> detect_basic(const TraceView& view, const DetectOptions& opt = {}) {
    auto out = detect_comparison(view, opt);
    auto mem = detect_membership(view);
    out.insert(out.end(), std::make_move_iterator(mem.begin()), std::make_move_iterator(mem.end()));
    return out;
}

}  // namespace txoracle
