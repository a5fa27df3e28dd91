// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "world.hpp"

namespace txoracle::sim {

enum class AttackScript { kFakeDeposit, kReentrantDrain, kUnauthorizedCall };

inline std::string_view to_string(AttackScript a) {
    switch (a) {
        case AttackScript::kFakeDeposit: return "FakeDeposit";
        case AttackScript::kReentrantDrain: return "ReentrantDrain";
        case AttackScript::kUnauthorizedCall: return "UnauthorizedCall";
    }
    return "?";
}

inline AttackScript parse_attack_script(std::string_view s) {
    for (auto a : {AttackScript::kFakeDeposit, AttackScript::kReentrantDrain, AttackScript::kUnauthorizedCall})
        if (to_string(a) == s) return a;
    throw Error(ErrorCode::kUnsupportedScript, "unknown attack script " + std::string{s});
}

/// A simulated contract that produces one transaction per call to next().
class Machine {
  public:
    virtual ~Machine() = default;

    [[nodiscard]] virtual Word contract() const = 0;
    [[nodiscard]] virtual std::string abi_json() const = 0;
    [[nodiscard]] virtual std::string layout_json() const = 0;

    /// header.origin and header.key_hints are filled in by the machine.
    virtual RawTxRecord next(TxHeader header) = 0;

    virtual RawTxRecord attack(AttackScript script, TxHeader) {
        throw Error(ErrorCode::kUnsupportedScript, std::string{to_string(script)} + " is not supported by this machine");
    }

    /// Whether the last next() call produced an injected anomaly.
    [[nodiscard]] bool last_anomalous() const { return last_anomalous_; }

  protected:
    bool last_anomalous_{false};
};

}  // namespace txoracle::sim
