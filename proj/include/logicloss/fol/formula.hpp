/*   Copyright 2026 the logicloss authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
 */
#pragma once

// ── Fuzzy first-order formulas ──────────────────────────────────────────────
//
// Design notes.
//  * A Formula is an immutable tree behind a shared_ptr; copies are O(1) and
//    value-semantic. Construction goes through checked factories, so a
//    well-typed Formula is structurally valid by construction (arity, constant
//    range). Name/scope validation happens in the parser, which sees the
//    whole context.
//  * Two negations coexist: residual negation `~x` (x => 0, semantics
//    dependent) and strong negation `!x` (always 1 - x). They are distinct
//    connectives, not sugar.
//  * Atoms: `task(x)` is the predicted probability that sample x is of that
//    semantic task; `ans(x)` is the predicted probability of sample x's gold
//    answer; bare numeric literals in [0, 1] are constant truth degrees.

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "logicloss/errors.hpp"

namespace logicloss::fol {

enum class Connective : std::uint8_t {
    StrongConj,    // x * y      t-norm
    StrongDisj,    // x (+) y    t-conorm
    WeakConj,      // x & y      min
    WeakDisj,      // x | y      max
    ResidualImpl,  // x => y     residuum
    MaterialImpl,  // x -> y     !x (+) y
    BiResidual,    // x <=> y    (x => y) * (y => x)
    ResidualNeg,   // ~x         x => 0
    StrongNeg,     // !x         1 - x
};

constexpr bool is_unary(Connective c) {
    return c == Connective::ResidualNeg || c == Connective::StrongNeg;
}

constexpr const char* connective_token(Connective c) {
    switch (c) {
        case Connective::StrongConj: return "*";
        case Connective::StrongDisj: return "(+)";
        case Connective::WeakConj: return "&";
        case Connective::WeakDisj: return "|";
        case Connective::ResidualImpl: return "=>";
        case Connective::MaterialImpl: return "->";
        case Connective::BiResidual: return "<=>";
        case Connective::ResidualNeg: return "~";
        case Connective::StrongNeg: return "!";
    }
    return "?";
}

enum class NodeKind : std::uint8_t {
    TaskAtom,    // predicate(variable)
    AnswerAtom,  // ans(variable)
    ConstAtom,   // literal in [0, 1]
    Unary,
    Binary,
    ForAll,
    Exists,
};

/// Name of the reserved answer predicate.
inline const std::string& answer_predicate() {
    static const std::string name = "ans";
    return name;
}

class Formula {
    struct Node {
        NodeKind kind;
        Connective conn = Connective::StrongConj;
        double value = 0.0;  // ConstAtom payload
        std::string name;    // TaskAtom predicate / quantifier + atom variable
        std::string var;
        std::shared_ptr<const Node> a, b;
    };

public:
    // Factories. Each validates its own arguments and throws on misuse.

    static Formula task(std::string predicate, std::string variable) {
        if (predicate.empty() || variable.empty())
            throw ValidationError("task atom needs a predicate and a variable");
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::TaskAtom;
        n->name = std::move(predicate);
        n->var = std::move(variable);
        return Formula(std::move(n));
    }

    static Formula answer(std::string variable) {
        if (variable.empty()) throw ValidationError("answer atom needs a variable");
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::AnswerAtom;
        n->var = std::move(variable);
        return Formula(std::move(n));
    }

    static Formula constant(double value) {
        if (!(value >= 0.0 && value <= 1.0))
            throw DomainError("constant truth degree must lie in [0, 1]");
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::ConstAtom;
        n->value = value;
        return Formula(std::move(n));
    }

    static Formula unary(Connective c, Formula operand) {
        if (!is_unary(c)) throw ArityError("binary connective used with one operand");
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Unary;
        n->conn = c;
        n->a = std::move(operand.node_);
        return Formula(std::move(n));
    }

    static Formula binary(Connective c, Formula lhs, Formula rhs) {
        if (is_unary(c)) throw ArityError("unary connective used with two operands");
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Binary;
        n->conn = c;
        n->a = std::move(lhs.node_);
        n->b = std::move(rhs.node_);
        return Formula(std::move(n));
    }

    static Formula forall(std::string variable, Formula body) {
        return quantifier(NodeKind::ForAll, std::move(variable), std::move(body));
    }

    static Formula exists(std::string variable, Formula body) {
        return quantifier(NodeKind::Exists, std::move(variable), std::move(body));
    }

    // Accessors. Each throws unless the node has the matching kind.

    NodeKind kind() const { return node_->kind; }

    Connective connective() const {
        require(kind() == NodeKind::Unary || kind() == NodeKind::Binary,
                "connective() on a non-connective node");
        return node_->conn;
    }

    double value() const {
        require(kind() == NodeKind::ConstAtom, "value() on a non-constant node");
        return node_->value;
    }

    const std::string& predicate() const {
        require(kind() == NodeKind::TaskAtom, "predicate() on a non-task node");
        return node_->name;
    }

    /// Variable of an atom or of a quantifier binder.
    const std::string& variable() const {
        require(kind() == NodeKind::TaskAtom || kind() == NodeKind::AnswerAtom ||
                    kind() == NodeKind::ForAll || kind() == NodeKind::Exists,
                "variable() on a node without a variable");
        return kind() == NodeKind::ForAll || kind() == NodeKind::Exists ? node_->name
                                                                        : node_->var;
    }

    // Children are returned by value: one shared_ptr copy, and concurrent
    // reads of a shared Formula stay safe.

    Formula lhs() const {
        require(node_->a != nullptr, "lhs() on a leaf");
        return Formula(node_->a);
    }

    Formula rhs() const {
        require(kind() == NodeKind::Binary, "rhs() on a non-binary node");
        return Formula(node_->b);
    }

    /// Operand of a unary connective or body of a quantifier.
    Formula body() const { return lhs(); }

    int depth() const { return depth_of(node_.get()); }

    int node_count() const { return count_of(node_.get()); }

    /// Structural equality (same shape, names, connectives, constants).
    friend bool operator==(const Formula& x, const Formula& y) {
        return equal(x.node_.get(), y.node_.get());
    }
    friend bool operator!=(const Formula& x, const Formula& y) { return !(x == y); }

    Formula(const Formula&) = default;
    Formula(Formula&&) = default;
    Formula& operator=(const Formula&) = default;
    Formula& operator=(Formula&&) = default;

private:
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static Formula quantifier(NodeKind kind, std::string variable, Formula body) {
        if (variable.empty()) throw ValidationError("quantifier needs a variable");
        auto n = std::make_shared<Node>();
        n->kind = kind;
        n->name = std::move(variable);
        n->a = std::move(body.node_);
        return Formula(std::move(n));
    }

    static void require(bool cond, const char* what) {
        if (!cond) throw Error(what);
    }

    static int depth_of(const Node* n) {
        if (!n) return 0;
        int d = depth_of(n->a.get());
        int e = depth_of(n->b.get());
        return 1 + (d > e ? d : e);
    }

    static int count_of(const Node* n) {
        if (!n) return 0;
        return 1 + count_of(n->a.get()) + count_of(n->b.get());
    }

    static bool equal(const Node* x, const Node* y) {
        if (x == y) return true;
        if (!x || !y) return false;
        if (x->kind != y->kind) return false;
        switch (x->kind) {
            case NodeKind::TaskAtom:
                return x->name == y->name && x->var == y->var;
            case NodeKind::AnswerAtom:
                return x->var == y->var;
            case NodeKind::ConstAtom:
                return x->value == y->value;
            case NodeKind::Unary:
                return x->conn == y->conn && equal(x->a.get(), y->a.get());
            case NodeKind::Binary:
                return x->conn == y->conn && equal(x->a.get(), y->a.get()) &&
                       equal(x->b.get(), y->b.get());
            case NodeKind::ForAll:
            case NodeKind::Exists:
                return x->name == y->name && equal(x->a.get(), y->a.get());
        }
        return false;
    }

    std::shared_ptr<const Node> node_;
};

/// One named rule of a knowledge base.
struct Rule {
    std::string name;
    double weight = 1.0;
    Formula formula;
};

/// A parsed rule file plus the task vocabulary it was validated against.
struct KnowledgeBase {
    std::vector<std::string> vocab;
    std::vector<Rule> rules;
};

}  // namespace logicloss::fol
