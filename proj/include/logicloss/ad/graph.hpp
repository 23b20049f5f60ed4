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

// ── Tape autodiff ───────────────────────────────────────────────────────────
//
// ExprGraph is an append-only arena of scalar operations; node ids are dense
// and topologically ordered by construction, so a forward pass is one linear
// sweep and reverse mode is the same sweep backwards. Expr is a cheap handle
// (graph pointer + id) with value-semantics operator overloads.
//
// Evaluation state lives in Evaluator, never in the graph, so one graph can
// back any number of concurrent evaluators. Input values persist inside an
// evaluator between runs; a caller that reuses an evaluator only rewrites
// the inputs that changed.
//
// Subgradient conventions at the kinks:
//   min / max   the first argument wins ties
//   abs         slope +1 at 0
//   clamp_lower slope 1 exactly at the threshold

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "logicloss/detail/numfmt.hpp"
#include "logicloss/errors.hpp"

namespace logicloss::ad {

enum class Op : std::uint8_t {
    Input,
    Const,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Log,
    Exp,
    Pow,         // payload holds the constant exponent
    Min,
    Max,
    Abs,
    ClampLower,  // max(x, payload)
};

using NodeId = std::int32_t;

struct Node {
    Op op = Op::Const;
    NodeId a = -1;
    NodeId b = -1;
    double payload = 0.0;
};

class ExprGraph;

class Expr {
public:
    Expr() = default;

    ExprGraph* graph() const { return g_; }
    NodeId id() const { return id_; }
    bool valid() const { return g_ != nullptr && id_ >= 0; }

private:
    friend class ExprGraph;
    Expr(ExprGraph* g, NodeId id) : g_(g), id_(id) {}

    ExprGraph* g_ = nullptr;
    NodeId id_ = -1;
};

class ExprGraph {
public:
    /// Named leaf; repeated calls with one name return the same node.
    Expr input(std::string name) {
        auto it = inputs_.find(name);
        if (it != inputs_.end()) return Expr(this, it->second);
        const NodeId id = push(Node{Op::Input, -1, -1, 0.0});
        input_names_.push_back(name);
        inputs_.emplace(std::move(name), id);
        return Expr(this, id);
    }

    Expr constant(double v) { return Expr(this, push(Node{Op::Const, -1, -1, v})); }

    Expr add(Expr x, Expr y) { return binary(Op::Add, x, y); }
    Expr sub(Expr x, Expr y) { return binary(Op::Sub, x, y); }
    Expr mul(Expr x, Expr y) { return binary(Op::Mul, x, y); }
    Expr div(Expr x, Expr y) { return binary(Op::Div, x, y); }
    Expr min(Expr x, Expr y) { return binary(Op::Min, x, y); }
    Expr max(Expr x, Expr y) { return binary(Op::Max, x, y); }
    Expr neg(Expr x) { return unary(Op::Neg, x); }
    Expr log(Expr x) { return unary(Op::Log, x); }
    Expr exp(Expr x) { return unary(Op::Exp, x); }
    Expr abs(Expr x) { return unary(Op::Abs, x); }
    Expr pow(Expr x, double exponent) {
        own(x);
        return Expr(this, push(Node{Op::Pow, x.id(), -1, exponent}));
    }
    Expr clamp_lower(Expr x, double threshold) {
        own(x);
        return Expr(this, push(Node{Op::ClampLower, x.id(), -1, threshold}));
    }

    std::size_t size() const { return nodes_.size(); }
    const std::vector<Node>& nodes() const { return nodes_; }

    /// Input names in slot-creation order.
    const std::vector<std::string>& input_names() const { return input_names_; }

    /// Node id of a named input, or -1.
    NodeId input_slot(std::string_view name) const {
        auto it = inputs_.find(std::string(name));
        return it == inputs_.end() ? -1 : it->second;
    }

    Expr at(NodeId id) {
        if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size())
            throw Error("node id out of range");
        return Expr(this, id);
    }

private:
    NodeId push(Node n) {
        nodes_.push_back(n);
        return static_cast<NodeId>(nodes_.size() - 1);
    }
    void own(Expr e) const {
        if (e.graph() != this) throw Error("expression belongs to a different graph");
    }
    Expr unary(Op op, Expr x) {
        own(x);
        return Expr(this, push(Node{op, x.id(), -1, 0.0}));
    }
    Expr binary(Op op, Expr x, Expr y) {
        own(x);
        own(y);
        return Expr(this, push(Node{op, x.id(), y.id(), 0.0}));
    }

    std::vector<Node> nodes_;
    std::vector<std::string> input_names_;
    std::unordered_map<std::string, NodeId> inputs_;
};

inline Expr operator+(Expr x, Expr y) { return x.graph()->add(x, y); }
inline Expr operator-(Expr x, Expr y) { return x.graph()->sub(x, y); }
inline Expr operator*(Expr x, Expr y) { return x.graph()->mul(x, y); }
inline Expr operator/(Expr x, Expr y) { return x.graph()->div(x, y); }
inline Expr operator-(Expr x) { return x.graph()->neg(x); }
inline Expr operator+(Expr x, double c) { return x + x.graph()->constant(c); }
inline Expr operator+(double c, Expr x) { return x.graph()->constant(c) + x; }
inline Expr operator-(Expr x, double c) { return x - x.graph()->constant(c); }
inline Expr operator-(double c, Expr x) { return x.graph()->constant(c) - x; }
inline Expr operator*(Expr x, double c) { return x * x.graph()->constant(c); }
inline Expr operator*(double c, Expr x) { return x.graph()->constant(c) * x; }
inline Expr operator/(Expr x, double c) { return x / x.graph()->constant(c); }
inline Expr operator/(double c, Expr x) { return x.graph()->constant(c) / x; }
inline Expr log(Expr x) { return x.graph()->log(x); }
inline Expr exp(Expr x) { return x.graph()->exp(x); }
inline Expr abs(Expr x) { return x.graph()->abs(x); }
inline Expr pow(Expr x, double e) { return x.graph()->pow(x, e); }
inline Expr min(Expr x, Expr y) { return x.graph()->min(x, y); }
inline Expr max(Expr x, Expr y) { return x.graph()->max(x, y); }
inline Expr clamp_lower(Expr x, double t) { return x.graph()->clamp_lower(x, t); }

/// Forward and reverse sweeps over one graph. The graph must outlive the
/// evaluator and must not grow while the evaluator is in use.
class Evaluator {
public:
    explicit Evaluator(const ExprGraph& g)
        : graph_(&g), val_(g.size(), 0.0), adj_(g.size(), 0.0) {}

    /// Writes one input slot; the value persists across forward passes.
    void set_input(NodeId id, double v) {
        check_input(id);
        val_[static_cast<std::size_t>(id)] = v;
    }
    void set_input(std::string_view name, double v) {
        const NodeId id = graph_->input_slot(name);
        if (id < 0) throw UnboundInput(std::string(name));
        val_[static_cast<std::size_t>(id)] = v;
    }

    /// Writes a contiguous run of input slots in one pass. Every node in
    /// [first, first + values.size()) must be an input.
    void set_input_range(NodeId first, std::span<const double> values) {
        const std::size_t lo = static_cast<std::size_t>(first);
        if (first < 0 || lo + values.size() > val_.size())
            throw Error("input range out of bounds");
        const std::vector<Node>& nodes = graph_->nodes();
        for (std::size_t k = 0; k < values.size(); ++k) {
            if (nodes[lo + k].op != Op::Input)
                throw Error("node is not an input slot");
            val_[lo + k] = values[k];
        }
    }

    /// One linear sweep over every node. Throws NonFiniteResult at the first
    /// node whose value is not finite.
    void forward() {
        const std::vector<Node>& nodes = graph_->nodes();
        double* v = val_.data();
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const Node& n = nodes[i];
            const double a = n.a >= 0 ? v[n.a] : 0.0;
            const double b = n.b >= 0 ? v[n.b] : 0.0;
            double r;
            switch (n.op) {
                case Op::Input: continue;  // retained from set_input
                case Op::Const: r = n.payload; break;
                case Op::Add: r = a + b; break;
                case Op::Sub: r = a - b; break;
                case Op::Mul: r = a * b; break;
                case Op::Div: r = a / b; break;
                case Op::Neg: r = -a; break;
                case Op::Log: r = std::log(a); break;
                case Op::Exp: r = std::exp(a); break;
                case Op::Pow: r = std::pow(a, n.payload); break;
                case Op::Min: r = a <= b ? a : b; break;
                case Op::Max: r = a >= b ? a : b; break;
                case Op::Abs: r = a < 0.0 ? -a : a; break;
                case Op::ClampLower: r = a >= n.payload ? a : n.payload; break;
                default: throw Error("unknown op");
            }
            if (!std::isfinite(r))
                throw NonFiniteResult(static_cast<std::int64_t>(i),
                                      "forward value is not finite");
            v[i] = r;
        }
    }

    double forward(Expr root) {
        check_root(root);
        forward();
        return val_[static_cast<std::size_t>(root.id())];
    }

    /// Reverse sweep from adjoint seeds; assumes forward() already ran.
    void backward_seeded(std::span<const std::pair<NodeId, double>> seeds) {
        std::fill(adj_.begin(), adj_.end(), 0.0);
        for (const auto& [id, w] : seeds) {
            if (id < 0 || static_cast<std::size_t>(id) >= adj_.size())
                throw Error("adjoint seed out of range");
            adj_[static_cast<std::size_t>(id)] += w;
        }
        const std::vector<Node>& nodes = graph_->nodes();
        const double* v = val_.data();
        double* adj = adj_.data();
        for (std::size_t i = nodes.size(); i-- > 0;) {
            const double g = adj[i];
            if (g == 0.0) continue;
            const Node& n = nodes[i];
            switch (n.op) {
                case Op::Input:
                case Op::Const: break;
                case Op::Add: adj[n.a] += g; adj[n.b] += g; break;
                case Op::Sub: adj[n.a] += g; adj[n.b] -= g; break;
                case Op::Mul: adj[n.a] += g * v[n.b]; adj[n.b] += g * v[n.a]; break;
                case Op::Div:
                    adj[n.a] += g / v[n.b];
                    adj[n.b] -= g * v[n.a] / (v[n.b] * v[n.b]);
                    break;
                case Op::Neg: adj[n.a] -= g; break;
                case Op::Log: adj[n.a] += g / v[n.a]; break;
                case Op::Exp: adj[n.a] += g * v[i]; break;
                case Op::Pow:
                    adj[n.a] += g * n.payload * std::pow(v[n.a], n.payload - 1.0);
                    break;
                case Op::Min: adj[v[n.a] <= v[n.b] ? n.a : n.b] += g; break;
                case Op::Max: adj[v[n.a] >= v[n.b] ? n.a : n.b] += g; break;
                case Op::Abs: adj[n.a] += v[n.a] >= 0.0 ? g : -g; break;
                case Op::ClampLower:
                    if (v[n.a] >= n.payload) adj[n.a] += g;
                    break;
            }
        }
    }

    void backward(Expr root) {
        check_root(root);
        const std::pair<NodeId, double> seed{root.id(), 1.0};
        backward_seeded(std::span<const std::pair<NodeId, double>>(&seed, 1));
    }

    double value(NodeId id) const { return val_.at(static_cast<std::size_t>(id)); }
    double adjoint(NodeId id) const { return adj_.at(static_cast<std::size_t>(id)); }
    std::span<const double> values() const { return val_; }
    std::span<const double> adjoints() const { return adj_; }

    double input_gradient(std::string_view name) const {
        const NodeId id = graph_->input_slot(name);
        if (id < 0) throw UnboundInput(std::string(name));
        return adj_[static_cast<std::size_t>(id)];
    }

    const ExprGraph& graph() const { return *graph_; }

private:
    void check_input(NodeId id) const {
        if (id < 0 || static_cast<std::size_t>(id) >= val_.size() ||
            graph_->nodes()[static_cast<std::size_t>(id)].op != Op::Input)
            throw Error("node is not an input slot");
    }
    void check_root(Expr root) const {
        if (root.graph() != graph_) throw Error("root belongs to a different graph");
    }

    const ExprGraph* graph_;
    std::vector<double> val_;
    std::vector<double> adj_;
};

namespace detail {

inline void bind_all(Evaluator& ev, const ExprGraph& g,
                     const std::unordered_map<std::string, double>& inputs) {
    for (const std::string& name : g.input_names())
        if (!inputs.count(name)) throw UnboundInput(name);
    for (const auto& [name, v] : inputs) {
        if (g.input_slot(name) < 0)
            throw UnboundInput(name + " (not an input of this graph)");
        ev.set_input(name, v);
    }
}

}  // namespace detail

/// Evaluates `root` with every graph input bound by name.
inline double eval_forward(Expr root,
                           const std::unordered_map<std::string, double>& inputs) {
    if (!root.valid()) throw Error("invalid expression");
    Evaluator ev(*root.graph());
    detail::bind_all(ev, *root.graph(), inputs);
    return ev.forward(root);
}

struct GradientResult {
    double value = 0.0;
    std::unordered_map<std::string, double> gradients;  // one entry per input
};

/// Value plus d root / d input for every named input.
inline GradientResult eval_gradient(
    Expr root, const std::unordered_map<std::string, double>& inputs) {
    if (!root.valid()) throw Error("invalid expression");
    Evaluator ev(*root.graph());
    detail::bind_all(ev, *root.graph(), inputs);
    GradientResult out;
    out.value = ev.forward(root);
    ev.backward(root);
    for (const std::string& name : root.graph()->input_names())
        out.gradients.emplace(name, ev.input_gradient(name));
    return out;
}

namespace detail {

inline void prefix_into(const ExprGraph& g, NodeId id, std::string& out) {
    const Node& n = g.nodes()[static_cast<std::size_t>(id)];
    auto walk = [&](NodeId c) { prefix_into(g, c, out); };
    switch (n.op) {
        case Op::Input: {
            for (const std::string& name : g.input_names())
                if (g.input_slot(name) == id) {
                    out += name;
                    return;
                }
            out += "?input";
            return;
        }
        case Op::Const: out += logicloss::detail::format_double(n.payload); return;
        case Op::Pow:
            out += "(pow ";
            walk(n.a);
            out += ' ';
            out += logicloss::detail::format_double(n.payload);
            out += ')';
            return;
        case Op::ClampLower:
            out += "(clamp-lower ";
            walk(n.a);
            out += ' ';
            out += logicloss::detail::format_double(n.payload);
            out += ')';
            return;
        default: break;
    }
    const char* name = "?";
    switch (n.op) {
        case Op::Add: name = "add"; break;
        case Op::Sub: name = "sub"; break;
        case Op::Mul: name = "mul"; break;
        case Op::Div: name = "div"; break;
        case Op::Neg: name = "neg"; break;
        case Op::Log: name = "log"; break;
        case Op::Exp: name = "exp"; break;
        case Op::Min: name = "min"; break;
        case Op::Max: name = "max"; break;
        case Op::Abs: name = "abs"; break;
        default: break;
    }
    out += '(';
    out += name;
    out += ' ';
    walk(n.a);
    if (n.b >= 0) {
        out += ' ';
        walk(n.b);
    }
    out += ')';
}

}  // namespace detail

/// S-expression spelling of the tree under `e` (shared nodes are repeated).
inline std::string to_prefix_string(Expr e) {
    if (!e.valid()) throw Error("invalid expression");
    std::string out;
    detail::prefix_into(*e.graph(), e.id(), out);
    return out;
}

}  // namespace logicloss::ad
