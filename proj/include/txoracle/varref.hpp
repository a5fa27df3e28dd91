// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "raw_record.hpp"

namespace txoracle {

/// Variable sources, declared in canonical ordering rank.
enum class VarKind : uint8_t { kTx, kFn, kEvent, kDelta, kSum, kState, kToken };

/// Comparability class: which variables may be related to each other.
enum class VarClass : uint8_t { kUnknown, kAddress, kAmount, kBlock, kTime, kBool, kBytes, kRaw };

inline std::string_view to_string(VarClass c) {
    switch (c) {
        case VarClass::kUnknown: return "unknown";
        case VarClass::kAddress: return "address";
        case VarClass::kAmount: return "amount";
        case VarClass::kBlock: return "block";
        case VarClass::kTime: return "time";
        case VarClass::kBool: return "bool";
        case VarClass::kBytes: return "bytes";
        case VarClass::kRaw: return "raw";
    }
    return "?";
}

/// Ordering is meaningful only between amounts, block numbers or timestamps.
inline bool orderable(VarClass c) { return c == VarClass::kAmount || c == VarClass::kBlock || c == VarClass::kTime; }

/// Whether equality between the two classes is worth testing.
inline bool comparable(VarClass a, VarClass b) {
    if (a == b) return a != VarClass::kUnknown;
    if (a == VarClass::kRaw) std::swap(a, b);
    if (b != VarClass::kRaw) return false;
    return a == VarClass::kAddress || a == VarClass::kAmount || a == VarClass::kBytes;
}

struct VarRef;
using VarPtr = std::shared_ptr<const VarRef>;

/// Mapping key: a concrete word, or another variable whose value is the key.
struct Key {
    Word concrete;
    VarPtr symbolic;

    [[nodiscard]] bool is_symbolic() const { return symbolic != nullptr; }
};

/// Reference to one trace variable. `text` is the canonical rendering and
/// doubles as the identity; everything else is structure for resolution.
struct VarRef {
    VarKind kind{VarKind::kTx};
    VarKind base{VarKind::kState};  // what a Delta differences: kState or kToken
    std::string name;               // tx field, parameter name or state label
    std::string event;
    uint32_t occurrence{0};
    std::vector<Key> keys;          // state key path, or {token, holder}
    std::string member;
    bool length{false};
    bool array{false};
    RecordPoint point;
    RecordPoint point_to;
    VarClass cls{VarClass::kUnknown};
    std::string text;

    [[nodiscard]] bool has_symbolic_key() const {
        for (const auto& k : keys)
            if (k.is_symbolic()) return true;
        return false;
    }
    [[nodiscard]] size_t concrete_key_count() const {
        size_t n = 0;
        for (const auto& k : keys)
            if (!k.is_symbolic()) ++n;
        return n;
    }
};

/// Canonical total order: kind rank, then text.
inline bool var_less(const VarRef& a, const VarRef& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.text < b.text;
}

inline bool var_less_ptr(const VarPtr& a, const VarPtr& b) { return var_less(*a, *b); }

namespace detail {

    template <typename KeyText>
    std::string render_var(const VarRef& v, KeyText&& key_text) {
        std::string keys;
        for (const auto& k : v.keys) {
            auto kt = key_text(k);
            if (!kt) return {};
            keys += "[" + *kt + "]";
        }
        auto member = v.member.empty() ? std::string{} : "." + v.member;
        auto state_body = "state." + v.name + keys + member;
        switch (v.kind) {
            case VarKind::kTx: return "tx." + v.name;
            case VarKind::kFn: return "fn." + v.name;
            case VarKind::kEvent: return "ev." + v.event + "[" + std::to_string(v.occurrence) + "]." + v.name;
            case VarKind::kSum: return "sum(state." + v.name + ")@" + to_string(v.point);
            case VarKind::kState:
                if (v.length) return "len(" + state_body + ")@" + to_string(v.point);
                return state_body + "@" + to_string(v.point);
            case VarKind::kToken: return "token" + keys + "@" + to_string(v.point);
            case VarKind::kDelta: {
                auto body = v.base == VarKind::kToken ? "token" + keys : state_body;
                return "delta(" + body + ")@[" + to_string(v.point) + "," + to_string(v.point_to) + "]";
            }
        }
        return {};
    }

}  // namespace detail

inline std::string render(const VarRef& v) {
    return detail::render_var(v, [](const Key& k) -> std::optional<std::string> {
        return k.is_symbolic() ? k.symbolic->text : k.concrete.short_hex();
    });
}

inline VarPtr finalize(VarRef v) {
    v.text = render(v);
    return std::make_shared<const VarRef>(std::move(v));
}

inline VarPtr make_tx_var(std::string field) {
    VarRef v;
    v.kind = VarKind::kTx;
    if (field == "sender" || field == "receiver") v.cls = VarClass::kAddress;
    else if (field == "block") v.cls = VarClass::kBlock;
    else if (field == "timestamp") v.cls = VarClass::kTime;
    else if (field == "value") v.cls = VarClass::kAmount;
    else throw Error(ErrorCode::kMalformedProperty, "unknown tx field " + field);
    v.name = std::move(field);
    return finalize(std::move(v));
}

inline VarPtr make_fn_var(std::string name, VarClass cls, bool array = false) {
    VarRef v;
    v.kind = VarKind::kFn;
    v.name = std::move(name);
    v.cls = cls;
    v.array = array;
    return finalize(std::move(v));
}

inline VarPtr make_event_var(std::string event, uint32_t occurrence, std::string name, VarClass cls, bool array = false) {
    VarRef v;
    v.kind = VarKind::kEvent;
    v.event = std::move(event);
    v.occurrence = occurrence;
    v.name = std::move(name);
    v.cls = cls;
    v.array = array;
    return finalize(std::move(v));
}

inline std::vector<Key> concrete_keys(const std::vector<Word>& words) {
    std::vector<Key> keys;
    for (const auto& w : words) keys.push_back({w, nullptr});
    return keys;
}

inline VarPtr make_state_var(std::string label, std::vector<Key> keys, std::string member, RecordPoint point, VarClass cls,
                             bool array = false) {
    VarRef v;
    v.kind = VarKind::kState;
    v.name = std::move(label);
    v.keys = std::move(keys);
    v.member = std::move(member);
    v.point = point;
    v.cls = cls;
    v.array = array;
    return finalize(std::move(v));
}

inline VarPtr make_length_var(std::string label, std::vector<Key> keys, RecordPoint point) {
    VarRef v;
    v.kind = VarKind::kState;
    v.name = std::move(label);
    v.keys = std::move(keys);
    v.length = true;
    v.point = point;
    v.cls = VarClass::kAmount;
    return finalize(std::move(v));
}

inline VarPtr make_sum_var(std::string label, RecordPoint point) {
    VarRef v;
    v.kind = VarKind::kSum;
    v.name = std::move(label);
    v.point = point;
    v.cls = VarClass::kAmount;
    return finalize(std::move(v));
}

inline VarPtr make_token_var(Key token, Key holder, RecordPoint point) {
    VarRef v;
    v.kind = VarKind::kToken;
    v.keys = {std::move(token), std::move(holder)};
    v.point = point;
    v.cls = VarClass::kAmount;
    return finalize(std::move(v));
}

/// Difference of a state or token variable between `from` and `to`.
inline VarPtr make_delta_var(const VarRef& of, RecordPoint from, RecordPoint to) {
    if (of.kind != VarKind::kState && of.kind != VarKind::kToken)
        throw Error(ErrorCode::kMalformedProperty, "delta of non-state variable " + of.text);
    VarRef v = of;
    v.base = of.kind;
    v.kind = VarKind::kDelta;
    v.point = from;
    v.point_to = to;
    v.cls = VarClass::kAmount;
    v.array = false;
    v.length = false;
    return finalize(std::move(v));
}

/// Copy of `v` with key `index` replaced.
inline VarPtr with_key(const VarRef& v, size_t index, Key key) {
    VarRef copy = v;
    copy.keys[index] = std::move(key);
    return finalize(std::move(copy));
}

/// Copy of a state or token variable moved to another record point.
inline VarPtr at_point(const VarRef& v, RecordPoint p) {
    VarRef copy = v;
    copy.point = p;
    return finalize(std::move(copy));
}

// ---------------------------------------------------------------------------
// text parser

class TextCursor {
  public:
    explicit TextCursor(std::string_view s) : s_(s) {}

    [[nodiscard]] bool done() const { return pos_ >= s_.size(); }
    [[nodiscard]] size_t pos() const { return pos_; }
    void reset(size_t p) { pos_ = p; }
    [[nodiscard]] std::string_view rest() const { return s_.substr(pos_); }

    void skip_ws() {
        while (!done() && s_[pos_] == ' ') ++pos_;
    }
    bool accept(std::string_view lit) {
        if (s_.substr(pos_, lit.size()) != lit) return false;
        pos_ += lit.size();
        return true;
    }
    void expect(std::string_view lit) {
        if (!accept(lit)) fail("expected '" + std::string{lit} + "'");
    }
    std::string ident() {
        size_t start = pos_;
        while (!done() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '$')) ++pos_;
        if (start == pos_) fail("expected identifier");
        return std::string{s_.substr(start, pos_ - start)};
    }
    std::string number_token() {
        size_t start = pos_;
        if (accept("-")) {
        }
        if (accept("0x")) {
            while (!done() && std::isxdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        } else {
            while (!done() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        }
        auto tok = std::string{s_.substr(start, pos_ - start)};
        if (tok.empty() || tok == "-" || tok == "0x" || tok == "-0x") fail("expected number");
        return tok;
    }
    [[nodiscard]] char peek() const { return done() ? '\0' : s_[pos_]; }

    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorCode::kMalformedProperty, what + " at column " + std::to_string(pos_) + " in '" + std::string{s_} + "'");
    }

  private:
    std::string_view s_;
    size_t pos_{0};
};

namespace detail {

    inline RecordPoint parse_point(TextCursor& c) {
        size_t start = c.pos();
        std::string name = c.ident();
        if (c.accept("(")) {
            auto n = c.number_token();
            c.expect(")");
            name += "(" + n + ")";
        }
        try {
            return parse_record_point(name);
        } catch (const Error&) {
            c.reset(start);
            c.fail("bad record point");
        }
    }

    VarPtr parse_var(TextCursor& c);

    inline std::vector<Key> parse_keys(TextCursor& c) {
        std::vector<Key> keys;
        while (c.accept("[")) {
            if (c.rest().substr(0, 2) == "0x") {
                keys.push_back({Word::from_hex(c.number_token()), nullptr});
            } else {
                keys.push_back({Word{}, parse_var(c)});
            }
            c.expect("]");
        }
        return keys;
    }

    struct StateBody {
        std::string label;
        std::vector<Key> keys;
        std::string member;
    };

    inline StateBody parse_state_body(TextCursor& c) {
        c.expect("state.");
        StateBody b;
        b.label = c.ident();
        b.keys = parse_keys(c);
        if (c.accept(".")) b.member = c.ident();
        return b;
    }

    inline VarPtr parse_var(TextCursor& c) {
        if (c.accept("tx.")) return make_tx_var(c.ident());
        if (c.accept("fn.")) return make_fn_var(c.ident(), VarClass::kUnknown);
        if (c.accept("ev.")) {
            auto ev = c.ident();
            c.expect("[");
            auto occ = c.number_token();
            c.expect("].");
            auto name = c.ident();
            return make_event_var(ev, static_cast<uint32_t>(std::stoul(occ)), name, VarClass::kUnknown);
        }
        if (c.accept("sum(")) {
            c.expect("state.");
            auto label = c.ident();
            c.expect(")@");
            return make_sum_var(label, parse_point(c));
        }
        if (c.accept("len(")) {
            auto b = parse_state_body(c);
            c.expect(")@");
            return make_length_var(b.label, std::move(b.keys), parse_point(c));
        }
        if (c.accept("delta(")) {
            VarRef inner;
            if (c.accept("token")) {
                inner.kind = VarKind::kToken;
                inner.keys = parse_keys(c);
                if (inner.keys.size() != 2) c.fail("token needs two keys");
            } else {
                auto b = parse_state_body(c);
                inner.kind = VarKind::kState;
                inner.name = std::move(b.label);
                inner.keys = std::move(b.keys);
                inner.member = std::move(b.member);
            }
            c.expect(")@[");
            auto from = parse_point(c);
            c.expect(",");
            auto to = parse_point(c);
            c.expect("]");
            return make_delta_var(inner, from, to);
        }
        if (c.accept("token")) {
            auto keys = parse_keys(c);
            if (keys.size() != 2) c.fail("token needs two keys");
            c.expect("@");
            return make_token_var(keys[0], keys[1], parse_point(c));
        }
        if (c.rest().substr(0, 6) == "state.") {
            auto b = parse_state_body(c);
            c.expect("@");
            return make_state_var(b.label, std::move(b.keys), b.member, parse_point(c), VarClass::kUnknown);
        }
        c.fail("expected variable");
    }

}  // namespace detail

inline VarPtr parse_var_ref(std::string_view text) {
    TextCursor c{text};
    auto v = detail::parse_var(c);
    if (!c.done()) c.fail("trailing input");
    return v;
}

}  // namespace txoracle
