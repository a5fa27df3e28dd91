// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "keccak.hpp"
#include "raw_record.hpp"

namespace txoracle {

struct EventNode {
    Word emitter;
    std::vector<Word> topics;
    Bytes data;
    size_t seq{0};
};

struct TxNode;
using TxNodePtr = std::shared_ptr<TxNode>;
using CftChild = std::variant<TxNodePtr, EventNode>;

/// Storage access stamped with its position in the raw step stream.
struct TimedAccess {
    size_t seq{0};
    StorageAccess access;
};

struct TxNode {
    Word sender;
    Word receiver;
    Bytes calldata;
    BigInt value;
    bool success{true};
    std::vector<uint64_t> jumpis;
    std::map<Word, std::pair<Word, Word>> storage_diff;  // slot -> (first pre, last post)
    std::vector<BalanceObservation> balances;
    std::vector<CftChild> children;
    size_t enter_seq{0};
    size_t exit_seq{0};
    size_t depth{0};

    /// Child calls only, in order.
    [[nodiscard]] std::vector<const TxNode*> calls() const {
        std::vector<const TxNode*> out;
        for (const auto& c : children)
            if (auto p = std::get_if<TxNodePtr>(&c)) out.push_back(p->get());
        return out;
    }
};

struct CallFlowTree {
    TxHeader header;
    TxNodePtr root;
    std::vector<TimedAccess> accesses;  // every storage access, in stream order
};

/// Rebuild the call nesting of a raw record. Jumpis, events, storage
/// accesses and balance observations belong to the innermost open call.
inline CallFlowTree build_cft(const RawTxRecord& record) {
    CallFlowTree tree;
    tree.header = record.header;
    std::vector<TxNode*> stack;
    auto open = [&](const char* what) -> TxNode& {
        if (stack.empty()) throw Error(ErrorCode::kMalformedRecord, std::string{what} + " outside of any call");
        return *stack.back();
    };
    for (size_t seq = 0; seq < record.steps.size(); ++seq) {
        const auto& step = record.steps[seq];
        if (auto s = std::get_if<CallEnter>(&step)) {
            auto node = std::make_shared<TxNode>();
            node->sender = s->sender;
            node->receiver = s->receiver;
            node->calldata = s->calldata;
            node->value = s->value;
            node->enter_seq = seq;
            node->depth = stack.size();
            TxNode* raw = node.get();
            if (stack.empty()) {
                if (tree.root) throw Error(ErrorCode::kMalformedRecord, "more than one top-level call");
                tree.root = std::move(node);
            } else {
                stack.back()->children.emplace_back(std::move(node));
            }
            stack.push_back(raw);
        } else if (auto s = std::get_if<CallExit>(&step)) {
            TxNode& n = open("CallExit");
            n.success = s->success;
            n.exit_seq = seq;
            stack.pop_back();
        } else if (auto s = std::get_if<Jumpi>(&step)) {
            open("Jumpi").jumpis.push_back(s->pc);
        } else if (auto s = std::get_if<EventEmit>(&step)) {
            open("EventEmit").children.emplace_back(EventNode{s->emitter, s->topics, s->data, seq});
        } else if (auto s = std::get_if<StorageAccess>(&step)) {
            TxNode& n = open("StorageAccess");
            if (n.receiver != s->contract)
                throw Error(ErrorCode::kMalformedRecord, "storage access of " + address_hex(s->contract) +
                                                             " inside a call to " + address_hex(n.receiver));
            auto [it, fresh] = n.storage_diff.try_emplace(s->slot, s->pre, s->post);
            if (!fresh) it->second.second = s->post;
            tree.accesses.push_back({seq, *s});
        } else if (auto s = std::get_if<BalanceObservation>(&step)) {
            open("BalanceObservation").balances.push_back(*s);
        }
    }
    if (!stack.empty()) throw Error(ErrorCode::kMalformedRecord, "unbalanced CallEnter/CallExit");
    if (!tree.root) throw Error(ErrorCode::kMalformedRecord, "record has no call");
    return tree;
}

template <typename F>
void for_each_node(const TxNode& node, F&& f) {
    f(node);
    for (const auto& c : node.children)
        if (auto p = std::get_if<TxNodePtr>(&c)) for_each_node(**p, f);
}

/// Pre-order list of every call node whose receiver is `target`, nested ones included.
inline std::vector<const TxNode*> select_relevant_subtrees(const CallFlowTree& cft, const Word& target) {
    std::vector<const TxNode*> out;
    if (!cft.root) return out;
    for_each_node(*cft.root, [&](const TxNode& n) {
        if (n.receiver == target) out.push_back(&n);
    });
    return out;
}

/// keccak256 over the node's own jumpi destinations, 8 bytes big-endian each.
inline Word branch_fingerprint(const TxNode& node) {
    Bytes buf;
    buf.reserve(node.jumpis.size() * 8);
    for (uint64_t pc : node.jumpis)
        for (int i = 7; i >= 0; --i) buf.push_back(static_cast<uint8_t>(pc >> (8 * i)));
    return keccak256(std::span<const uint8_t>{buf});
}

}  // namespace txoracle
