// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "varref.hpp"

namespace txoracle {

enum class Shape : uint8_t { kCompare, kNegation, kConstEq, kMembership, kLinear, kQuadratic };
enum class CmpOp : uint8_t { kEq, kLe, kGe };
enum class Provenance : uint8_t { kBasic, kInferred };

inline std::string_view to_string(CmpOp op) {
    switch (op) {
        case CmpOp::kEq: return "==";
        case CmpOp::kLe: return "<=";
        case CmpOp::kGe: return ">=";
    }
    return "?";
}

inline std::string_view to_string(Provenance p) { return p == Provenance::kBasic ? "basic" : "inferred"; }

/// Pattern families used for filtering and reporting.
inline std::string_view pattern_name(Shape s) {
    switch (s) {
        case Shape::kCompare:
        case Shape::kNegation: return "comparison";
        case Shape::kConstEq: return "constant";
        case Shape::kMembership: return "membership";
        case Shape::kLinear:
        case Shape::kQuadratic: return "arithmetic";
    }
    return "?";
}

/// A candidate formula over trace variables, always held in canonical form.
///
/// vars: Compare/Negation {lhs, rhs}; ConstEq {v}; Membership {elem, array};
/// Linear {x1..xn} with integer `coeffs`; Quadratic {x, y}.
struct Property {
    Shape shape{Shape::kCompare};
    CmpOp op{CmpOp::kEq};
    std::vector<VarPtr> vars;
    std::vector<BigInt> coeffs;
    BigInt constant;
    std::string field;
    bool hex_constant{false};
    std::string text;

    bool operator==(const Property& o) const { return text == o.text; }
    bool operator<(const Property& o) const { return text < o.text; }

    [[nodiscard]] size_t concrete_key_count() const {
        size_t n = 0;
        for (const auto& v : vars) n += v->concrete_key_count();
        return n;
    }
};

namespace detail {

    inline std::string render_property(const Property& p) {
        switch (p.shape) {
            case Shape::kCompare:
                return p.vars[0]->text + " " + std::string{to_string(p.op)} + " " + p.vars[1]->text;
            case Shape::kNegation: return p.vars[0]->text + " == -" + p.vars[1]->text;
            case Shape::kConstEq: {
                std::string c = p.hex_constant && p.constant >= 0 ? Word::from_uint(p.constant).short_hex() : to_decimal(p.constant);
                return p.vars[0]->text + " == " + c;
            }
            case Shape::kMembership: {
                auto s = p.vars[0]->text + " in " + p.vars[1]->text;
                if (!p.field.empty()) s += "{" + p.field + "}";
                return s;
            }
            case Shape::kLinear: {
                std::string s;
                for (size_t i = 0; i < p.vars.size(); ++i) {
                    const BigInt& c = p.coeffs[i];
                    if (i == 0) s += (c < 0 ? "-" : "");
                    else s += c < 0 ? " - " : " + ";
                    s += to_decimal(c < 0 ? BigInt{-c} : c) + "*" + p.vars[i]->text;
                }
                return s + " == " + to_decimal(p.constant);
            }
            case Shape::kQuadratic: return p.vars[0]->text + " * " + p.vars[1]->text + " == " + to_decimal(p.constant);
        }
        return {};
    }

}  // namespace detail

inline Property finalize(Property p) {
    p.text = detail::render_property(p);
    return p;
}

inline Property make_compare(VarPtr a, CmpOp op, VarPtr b) {
    if (a->text == b->text) throw Error(ErrorCode::kMalformedProperty, "reflexive comparison " + a->text);
    if (var_less(*b, *a)) {
        std::swap(a, b);
        if (op == CmpOp::kLe) op = CmpOp::kGe;
        else if (op == CmpOp::kGe) op = CmpOp::kLe;
    }
    Property p;
    p.shape = Shape::kCompare;
    p.op = op;
    p.vars = {std::move(a), std::move(b)};
    return finalize(std::move(p));
}

inline Property make_negation(VarPtr a, VarPtr b) {
    if (a->text == b->text) throw Error(ErrorCode::kMalformedProperty, "reflexive negation " + a->text);
    if (var_less(*b, *a)) std::swap(a, b);
    Property p;
    p.shape = Shape::kNegation;
    p.vars = {std::move(a), std::move(b)};
    return finalize(std::move(p));
}

inline Property make_const_eq(VarPtr v, BigInt c, bool hex = false) {
    Property p;
    p.shape = Shape::kConstEq;
    p.hex_constant = hex && c >= 0;
    p.vars = {std::move(v)};
    p.constant = std::move(c);
    return finalize(std::move(p));
}

inline Property make_membership(VarPtr elem, VarPtr array, std::string field = {}) {
    Property p;
    p.shape = Shape::kMembership;
    p.vars = {std::move(elem), std::move(array)};
    p.field = std::move(field);
    return finalize(std::move(p));
}

/// sum(coeffs[i] * vars[i]) == constant, normalized: variables sorted and
/// merged, zero terms dropped, gcd 1, leading coefficient positive.
inline Property make_linear(std::vector<VarPtr> vars, std::vector<BigInt> coeffs, BigInt constant) {
    std::vector<size_t> order(vars.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return var_less(*vars[a], *vars[b]); });
    Property p;
    p.shape = Shape::kLinear;
    for (size_t i : order) {
        if (!p.vars.empty() && p.vars.back()->text == vars[i]->text) {
            p.coeffs.back() += coeffs[i];
            continue;
        }
        p.vars.push_back(vars[i]);
        p.coeffs.push_back(coeffs[i]);
    }
    for (size_t i = p.vars.size(); i-- > 0;) {
        if (p.coeffs[i] == 0) {
            p.vars.erase(p.vars.begin() + static_cast<std::ptrdiff_t>(i));
            p.coeffs.erase(p.coeffs.begin() + static_cast<std::ptrdiff_t>(i));
        }
    }
    if (p.vars.empty()) throw Error(ErrorCode::kMalformedProperty, "linear relation without variables");
    BigInt g = boost::multiprecision::abs(constant);
    for (const auto& c : p.coeffs) g = boost::multiprecision::gcd(g, BigInt{boost::multiprecision::abs(c)});
    bool flip = p.coeffs.front() < 0;
    for (auto& c : p.coeffs) {
        c /= g;
        if (flip) c = -c;
    }
    p.constant = constant / g;
    if (flip) p.constant = -p.constant;
    return finalize(std::move(p));
}

inline Property make_quadratic(VarPtr x, VarPtr y, BigInt constant) {
    if (var_less(*y, *x)) std::swap(x, y);
    Property p;
    p.shape = Shape::kQuadratic;
    p.vars = {std::move(x), std::move(y)};
    p.constant = std::move(constant);
    return finalize(std::move(p));
}

/// Rebuild `p` around a replacement variable list, keeping it canonical.
inline Property with_vars(const Property& p, std::vector<VarPtr> vars) {
    switch (p.shape) {
        case Shape::kCompare: return make_compare(vars[0], p.op, vars[1]);
        case Shape::kNegation: return make_negation(vars[0], vars[1]);
        case Shape::kConstEq: return make_const_eq(vars[0], p.constant, p.hex_constant);
        case Shape::kMembership: return make_membership(vars[0], vars[1], p.field);
        case Shape::kLinear: return make_linear(std::move(vars), p.coeffs, p.constant);
        case Shape::kQuadratic: return make_quadratic(vars[0], vars[1], p.constant);
    }
    return p;
}

/// Parse the canonical text form back into a property.
inline Property parse_property(std::string_view text) {
    TextCursor c{text};
    auto finish = [&](Property p) {
        if (!c.done()) c.fail("trailing input");
        return p;
    };
    char first = c.peek();
    if (first == '-' || std::isdigit(static_cast<unsigned char>(first))) {
        std::vector<VarPtr> vars;
        std::vector<BigInt> coeffs;
        bool negative = c.accept("-");
        while (true) {
            BigInt k = parse_integer(c.number_token());
            c.expect("*");
            vars.push_back(detail::parse_var(c));
            coeffs.push_back(negative ? BigInt{-k} : k);
            c.skip_ws();
            if (c.accept("+ ")) negative = false;
            else if (c.accept("- ")) negative = true;
            else break;
        }
        c.expect("== ");
        BigInt constant = parse_integer(c.number_token());
        return finish(make_linear(std::move(vars), std::move(coeffs), std::move(constant)));
    }
    VarPtr lhs = detail::parse_var(c);
    if (c.accept(" in ")) {
        VarRef arr = *detail::parse_var(c);
        arr.array = true;
        std::string field;
        if (c.accept("{")) {
            field = c.ident();
            c.expect("}");
        }
        return finish(make_membership(lhs, std::make_shared<const VarRef>(std::move(arr)), std::move(field)));
    }
    if (c.accept(" * ")) {
        VarPtr rhs = detail::parse_var(c);
        c.expect(" == ");
        return finish(make_quadratic(lhs, rhs, parse_integer(c.number_token())));
    }
    CmpOp op = CmpOp::kEq;
    if (c.accept(" <= ")) op = CmpOp::kLe;
    else if (c.accept(" >= ")) op = CmpOp::kGe;
    else c.expect(" == ");
    if (op == CmpOp::kEq && c.accept("-")) {
        if (std::isdigit(static_cast<unsigned char>(c.peek()))) {
            return finish(make_const_eq(lhs, -parse_integer(c.number_token())));
        }
        return finish(make_negation(lhs, detail::parse_var(c)));
    }
    if (op == CmpOp::kEq && std::isdigit(static_cast<unsigned char>(c.peek()))) {
        auto tok = c.number_token();
        bool hex = tok.rfind("0x", 0) == 0;
        return finish(make_const_eq(lhs, parse_integer(tok), hex));
    }
    VarPtr rhs = detail::parse_var(c);
    return finish(make_compare(lhs, op, rhs));
}

}  // namespace txoracle
