// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include "hand_trace.hpp"
#include "txoracle/sim/scenario.hpp"
#include "txoracle/trace_view.hpp"

using namespace txoracle;
using reftest::addr;
using reftest::HandTrace;

namespace {

const RecordPoint kPre = RecordPoint::pre_call();
const RecordPoint kPost = RecordPoint::post_call();

std::vector<VarPtr> sample_vars() {
    auto sender = make_tx_var("sender");
    auto ast = make_fn_var("ast", VarClass::kAddress);
    auto balances = make_state_var("balances", concrete_keys({addr(0xb0b)}), {}, kPost, VarClass::kAmount);
    VarRef token_base;
    token_base.kind = VarKind::kToken;
    token_base.keys = {{Word{}, ast}, {Word{}, sender}};
    return {
        sender,
        make_tx_var("timestamp"),
        make_fn_var("amt", VarClass::kAmount),
        make_event_var("Deposit", 1, "safeAmt", VarClass::kAmount),
        balances,
        make_state_var("allowance", {{Word{}, sender}, {addr(7), nullptr}}, {}, kPre, VarClass::kAmount),
        make_state_var("limits", {}, "limit", RecordPoint::pre_sub(2), VarClass::kAmount),
        make_length_var("whitelist", {}, kPre),
        make_sum_var("balances", kPost),
        make_token_var({Word{}, ast}, {Word{}, sender}, kPost),
        make_token_var({ether_marker(), nullptr}, {addr(5), nullptr}, RecordPoint::post_sub(0)),
        make_delta_var(*balances, kPre, kPost),
        make_delta_var(token_base, RecordPoint::pre_sub(0), RecordPoint::post_sub(0)),
    };
}

}  // namespace

TEST_CASE("variable text parses back to the same variable") {
    for (const auto& v : sample_vars()) {
        auto back = parse_var_ref(v->text);
        REQUIRE(back->text == v->text);
        REQUIRE(back->kind == v->kind);
        REQUIRE(back->keys.size() == v->keys.size());
        REQUIRE(back->concrete_key_count() == v->concrete_key_count());
    }
    REQUIRE(make_delta_var(*sample_vars()[4], kPre, kPost)->text == "delta(state.balances[0xb0b])@[PreCall,PostCall]");
    REQUIRE(sample_vars()[9]->text == "token[fn.ast][tx.sender]@PostCall");
    REQUIRE(sample_vars()[8]->text == "sum(state.balances)@PostCall");
}

TEST_CASE("malformed variable and property text is rejected") {
    for (const char* bad : {"", "foo.bar", "tx.nonce", "state.x@Later", "delta(tx.sender)@[PreCall,PostCall]", "state.x[0xzz]@PreCall"})
        REQUIRE_THROWS_AS(parse_var_ref(bad), Error);
    for (const char* bad : {"tx.sender", "tx.sender == ", "tx.sender === tx.receiver", "tx.sender == tx.sender", "1*tx.value == 2 extra"})
        REQUIRE_THROWS_AS(parse_property(bad), Error);
}

TEST_CASE("every shape round trips through its text") {
    auto vars = sample_vars();
    auto amt = vars[2];
    auto whitelist = make_state_var("whitelist", {}, {}, kPre, VarClass::kUnknown, true);
    std::vector<Property> props{
        make_compare(vars[4], CmpOp::kEq, amt),
        make_compare(amt, CmpOp::kLe, vars[3]),
        make_compare(vars[3], CmpOp::kGe, vars[11]),
        make_negation(vars[11], amt),
        make_const_eq(amt, 0),
        make_const_eq(vars[0], addr(0xa11ce).to_uint(), true),
        make_const_eq(vars[11], -25),
        make_membership(vars[0], whitelist),
        make_membership(vars[0], make_state_var("limits", {}, {}, kPre, VarClass::kUnknown, true), "addr"),
        make_linear({amt, vars[3], vars[8]}, {6, -4, 2}, 10),
        make_linear({vars[3]}, {-1}, 3),
        make_quadratic(vars[3], amt, 12),
    };
    for (const auto& p : props) {
        auto back = parse_property(p.text);
        REQUIRE(back.text == p.text);
        REQUIRE(back.shape == p.shape);
    }
    REQUIRE(props[9].text == "3*fn.amt - 2*ev.Deposit[1].safeAmt + 1*sum(state.balances)@PostCall == 5");
    REQUIRE(props[10].text == "1*ev.Deposit[1].safeAmt == -3");
    REQUIRE(props[5].text == "tx.sender == 0xa11ce");
}

TEST_CASE("canonical forms do not depend on argument order") {
    auto a = make_fn_var("amt", VarClass::kAmount);
    auto b = make_event_var("Transfer", 0, "value", VarClass::kAmount);
    REQUIRE(make_compare(a, CmpOp::kEq, b).text == make_compare(b, CmpOp::kEq, a).text);
    REQUIRE(make_compare(a, CmpOp::kLe, b).text == make_compare(b, CmpOp::kGe, a).text);
    REQUIRE(make_negation(a, b).text == make_negation(b, a).text);
    REQUIRE(make_quadratic(a, b, 4).text == make_quadratic(b, a, 4).text);
    REQUIRE(make_linear({a, b}, {2, -4}, 6).text == make_linear({b, a}, {2, -1}, -3).text);
    REQUIRE_THROWS_AS(make_compare(a, CmpOp::kEq, a), Error);
    REQUIRE_THROWS_AS(make_linear({a, a}, {1, -1}, 0), Error);
}

TEST_CASE("numeric view of a delta and absent variables") {
    HandTrace h;
    h.state2("balances", {addr(0xb0b)}, 10, 110);
    auto base = make_state_var("balances", concrete_keys({addr(0xb0b)}), {}, kPre, VarClass::kAmount);
    REQUIRE(numeric_view(h.get(), *make_delta_var(*base, kPre, kPost)) == 100);
    REQUIRE_FALSE(numeric_view(h.get(), *make_event_var("Transfer", 0, "value", VarClass::kAmount)));
    REQUIRE_FALSE(numeric_view(h.get(), *make_state_var("balances", concrete_keys({addr(1)}), {}, kPre, VarClass::kAmount)));
}

TEST_CASE("symbolic keys resolve through trace values") {
    HandTrace h;
    h.sender(addr(0xb)).param("ast", TypedValue::address(addr(0xa))).token(kPost, addr(0xa), addr(0xb), 42);
    auto ast = make_fn_var("ast", VarClass::kAddress);
    auto v = make_token_var({Word{}, ast}, {Word{}, make_tx_var("sender")}, kPost);
    TraceView view{h.get()};
    REQUIRE(view.value(*v) == 42);
    REQUIRE(view.concrete_text(*v) == "token[0xa][0xb]@PostCall");
    HandTrace other;
    other.param("ast", TypedValue::address(addr(0xa)));
    REQUIRE_FALSE(numeric_view(other.get(), *v));
}

TEST_CASE("evaluation statuses") {
    HandTrace h;
    h.param("amt", TypedValue::unsigned_int(100)).state2("balances", {addr(1)}, 500, 400).state2("balances", {addr(2)}, 0, 100)
        .state(kPost, "totalSupply", {}, TypedValue::unsigned_int(500));
    const auto& t = h.get();
    REQUIRE(evaluate(parse_property("sum(state.balances)@PostCall == state.totalSupply@PostCall"), t) == Status::kSatisfied);
    REQUIRE(evaluate(parse_property("fn.amt == -delta(state.balances[0x1])@[PreCall,PostCall]"), t) == Status::kSatisfied);
    REQUIRE(evaluate(parse_property("fn.amt == delta(state.balances[0x2])@[PreCall,PostCall]"), t) == Status::kSatisfied);
    REQUIRE(evaluate(parse_property("fn.amt == delta(state.balances[0x1])@[PreCall,PostCall]"), t) == Status::kViolated);
    REQUIRE(evaluate(parse_property("fn.amt == ev.Transfer[0].value"), t) == Status::kInapplicable);
    REQUIRE(evaluate(parse_property("fn.amt <= state.totalSupply@PostCall"), t) == Status::kSatisfied);
    REQUIRE(evaluate(parse_property("fn.amt >= state.totalSupply@PostCall"), t) == Status::kViolated);
    REQUIRE(evaluate(parse_property("1*fn.amt + 1*state.balances[0x1]@PostCall == 500"), t) == Status::kSatisfied);
    REQUIRE(evaluate(parse_property("fn.amt * state.balances[0x2]@PostCall == 10000"), t) == Status::kSatisfied);
    REQUIRE(evaluate(parse_property("fn.amt == 100"), t) == Status::kSatisfied);
    REQUIRE(evaluate(parse_property("fn.amt == 101"), t) == Status::kViolated);
}

TEST_CASE("membership evaluation over plain and struct arrays") {
    HandTrace h;
    h.sender(addr(3))
        .array(kPre, "whitelist", {TypedValue::address(addr(1)), TypedValue::address(addr(3))})
        .struct_array(kPre, "limits", {{{"addr", TypedValue::address(addr(9))}, {"limit", TypedValue::unsigned_int(3)}}});
    REQUIRE(evaluate(parse_property("tx.sender in state.whitelist@PreCall"), h.get()) == Status::kSatisfied);
    REQUIRE(evaluate(parse_property("tx.sender in state.limits@PreCall{addr}"), h.get()) == Status::kViolated);
    REQUIRE(evaluate(parse_property("tx.sender in state.limits@PreCall{limit}"), h.get()) == Status::kSatisfied);
    REQUIRE(evaluate(parse_property("tx.sender in state.owners@PreCall"), h.get()) == Status::kInapplicable);
}

TEST_CASE("erc20 supply invariant holds on every simulated trace") {
    sim::ScenarioSpec spec;
    spec.tx_count = 60;
    spec.seed = 21;
    auto c = sim::gen_corpus(spec);
    auto meta = ContractMeta::load(c.contract, c.abi_json, c.layout_json);
    auto inv = parse_property("sum(state.balances)@PostCall == state.totalSupply@PostCall");
    for (const auto& r : c.records)
        for (const auto& t : extract_traces(r, meta)) REQUIRE(evaluate(inv, t) == Status::kSatisfied);
}

TEST_CASE("fake deposit violates the deposit amount invariant") {
    sim::ScenarioSpec spec;
    spec.machine = sim::MachineKind::kDepositVault;
    spec.tx_count = 5;
    spec.seed = 2;
    spec.attack = sim::AttackScript::kFakeDeposit;
    auto c = sim::gen_corpus(spec);
    auto t = extract_traces(*c.attack, ContractMeta::load(c.contract, c.abi_json, c.layout_json)).at(0);
    auto inv = parse_property("fn.amt == delta(token[fn.ast][tx.receiver])@[PreCall,PostCall]");
    REQUIRE(evaluate(inv, t) == Status::kViolated);
}
