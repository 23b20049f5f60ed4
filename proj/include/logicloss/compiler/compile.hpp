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

// ── Formula → differentiable loss ───────────────────────────────────────────
//
// The loss of a formula φ is g(truth(φ)): zero exactly when φ is fully
// satisfied, growing as its truth degree drops. For the fragment
//
//   strong conjunction, weak conjunction / disjunction, residual
//   implication and biresiduum, residual negation (nilpotent members
//   only), and both quantifiers
//
// g distributes over the connectives, so the compiled graph works entirely
// in generator space: g is applied once at the leaves and never inverted.
//
//   g(x ⊗ y)  = min{g(0), g(x) + g(y)}      (the cap only binds nilpotent g)
//   g(x ∧ y)  = max{g(x), g(y)}             g decreasing flips min and max
//   g(x ∨ y)  = min{g(x), g(y)}
//   g(x => y) = max{0, g(y) - g(x)}
//   g(x <=> y)= |g(x) - g(y)|
//   g(~x)     = g(0) - g(x)                  finite g(0) only
//   g(∀x φ)   = min{g(0), Σ_i g(φ[x:=i])}
//   g(∃x φ)   = min_i g(φ[x:=i])
//
// Strong disjunction, material implication, and strong negation need the
// dual 1 - x, which generator space cannot express; compile() refuses them
// (and anything at all under a semantics with no generator). truth_degree()
// below has no such limits: it evaluates every connective numerically.
//
// Inputs of a compiled graph are probabilities, named per sample index:
//   s<i>.ans         probability the model puts on sample i's gold answer
//   s<i>.tsk.<name>  probability sample i is an instance of task <name>
// Quantified variables range over sample indices 0 .. domain_size-1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "logicloss/ad/graph.hpp"
#include "logicloss/errors.hpp"
#include "logicloss/fol/formula.hpp"
#include "logicloss/tnorm/semantics.hpp"

namespace logicloss::compiler {

/// Ordered task-name list with index lookup.
class TaskVocab {
public:
    TaskVocab() = default;
    explicit TaskVocab(std::vector<std::string> names) : names_(std::move(names)) {
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (names_[i].empty()) throw ValidationError("empty task name");
            if (!index_.emplace(names_[i], static_cast<int>(i)).second)
                throw ValidationError("duplicate task name '" + names_[i] + "'");
        }
    }

    const std::vector<std::string>& names() const { return names_; }
    std::size_t size() const { return names_.size(); }
    bool contains(std::string_view name) const {
        return index_.count(std::string(name)) > 0;
    }
    int index(std::string_view name) const {
        auto it = index_.find(std::string(name));
        if (it == index_.end())
            throw ValidationError("unknown task '" + std::string(name) + "'");
        return it->second;
    }
    const std::string& name(int i) const {
        if (i < 0 || static_cast<std::size_t>(i) >= names_.size())
            throw ValidationError("task index out of range");
        return names_[static_cast<std::size_t>(i)];
    }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
};

/// Model outputs for one sample, as the logic layer sees them.
struct SampleOutputs {
    std::vector<double> answer_probs;  // over the answer vocabulary
    std::vector<double> task_probs;    // over the task vocabulary
    int gold_answer = -1;
    int gold_task = -1;

    double gold_answer_prob() const {
        if (gold_answer < 0 ||
            static_cast<std::size_t>(gold_answer) >= answer_probs.size())
            throw ValidationError("gold answer index out of range");
        return answer_probs[static_cast<std::size_t>(gold_answer)];
    }
    double gold_task_prob() const {
        if (gold_task < 0 || static_cast<std::size_t>(gold_task) >= task_probs.size())
            throw ValidationError("gold task index out of range");
        return task_probs[static_cast<std::size_t>(gold_task)];
    }
};

/// Input name for sample i's gold-answer probability.
inline std::string sample_answer_input(int i) {
    return "s" + std::to_string(i) + ".ans";
}

/// Input name for sample i's probability of task `name`.
inline std::string sample_task_input(int i, std::string_view name) {
    return "s" + std::to_string(i) + ".tsk." + std::string(name);
}

namespace detail {

struct Env {
    std::vector<std::pair<std::string, int>> frames;

    int lookup(const std::string& var) const {
        for (auto it = frames.rbegin(); it != frames.rend(); ++it)
            if (it->first == var) return it->second;
        throw ValidationError("variable '" + var + "' is not bound");
    }
};

}  // namespace detail

/// Reference semantics: the truth degree of `f` where quantifiers range over
/// `samples` and atoms read the per-sample outputs. Supports every
/// connective of every family.
inline double truth_degree(const fol::Formula& f,
                           std::span<const SampleOutputs> samples,
                           const TaskVocab& vocab, const tnorm::Semantics& sem) {
    struct Walker {
        std::span<const SampleOutputs> samples;
        const TaskVocab& vocab;
        const tnorm::Semantics& sem;
        detail::Env env;

        double atom(const fol::Formula& f) {
            const int i = env.lookup(f.variable());
            const SampleOutputs& s = samples[static_cast<std::size_t>(i)];
            if (f.kind() == fol::NodeKind::AnswerAtom) return s.gold_answer_prob();
            const int t = vocab.index(f.predicate());
            if (s.task_probs.size() != vocab.size())
                throw ShapeMismatch("task probability vector does not match the vocabulary");
            return s.task_probs[static_cast<std::size_t>(t)];
        }

        double walk(const fol::Formula& f) {
            switch (f.kind()) {
                case fol::NodeKind::ConstAtom: return f.value();
                case fol::NodeKind::TaskAtom:
                case fol::NodeKind::AnswerAtom: return atom(f);
                case fol::NodeKind::Unary:
                    return tnorm::eval_connective(sem, f.connective(), walk(f.body()));
                case fol::NodeKind::Binary:
                    return tnorm::eval_connective(sem, f.connective(), walk(f.lhs()),
                                                  walk(f.rhs()));
                case fol::NodeKind::ForAll: return quantified(f, true);
                case fol::NodeKind::Exists: return quantified(f, false);
            }
            throw ValidationError("unknown formula node");
        }

        double quantified(const fol::Formula& f, bool universal) {
            if (samples.empty())
                throw ValidationError("quantifier over an empty sample span");
            env.frames.emplace_back(f.variable(), 0);
            double acc = 0.0;
            if (universal && !tnorm::is_table_only(sem)) {
                // g-space sum form, matching the compiled graph
                const double cap = tnorm::gen_zero(sem);
                for (std::size_t i = 0; i < samples.size(); ++i) {
                    env.frames.back().second = static_cast<int>(i);
                    acc += tnorm::gen(sem, walk(f.body()));
                    if (acc >= cap) {
                        acc = cap;
                        break;
                    }
                }
                acc = tnorm::gen_inverse(sem, acc);
            } else {
                for (std::size_t i = 0; i < samples.size(); ++i) {
                    env.frames.back().second = static_cast<int>(i);
                    const double t = walk(f.body());
                    if (i == 0)
                        acc = t;
                    else
                        acc = universal ? std::min(acc, t) : std::max(acc, t);
                }
            }
            env.frames.pop_back();
            return acc;
        }
    };
    Walker w{samples, vocab, sem, {}};
    return w.walk(f);
}

/// A formula lowered to a loss graph; see the header comment for the input
/// naming scheme.
struct CompiledLoss {
    std::shared_ptr<ad::ExprGraph> graph;
    ad::Expr root;
    tnorm::Semantics semantics;
    int domain_size = 0;

    const std::vector<std::string>& inputs() const { return graph->input_names(); }

    double value(const std::unordered_map<std::string, double>& at) const {
        return ad::eval_forward(root, at);
    }
    ad::GradientResult gradient(
        const std::unordered_map<std::string, double>& at) const {
        return ad::eval_gradient(root, at);
    }
};

namespace detail {

/// g applied to a probability input, as graph operations.
inline ad::Expr emit_gen(ad::ExprGraph& g, ad::Expr x, const tnorm::Semantics& s) {
    using tnorm::Family;
    switch (s.family) {
        case Family::Lukasiewicz: return 1.0 - x;
        case Family::Product: return -ad::log(x);
        case Family::SchweizerSklar:
            if (s.lambda == 0.0) return -ad::log(x);
            if (s.lambda == 1.0) return 1.0 - x;
            return (1.0 - ad::pow(x, s.lambda)) / s.lambda;
        case Family::Frank: {
            const double l = s.lambda;
            if (l == 1.0) return -ad::log(x);
            if (std::isinf(l)) return 1.0 - x;
            const ad::Expr p = ad::exp(x * std::log(l));  // l^x
            return l > 1.0 ? std::log(l - 1.0) - ad::log(p - 1.0)
                           : std::log(1.0 - l) - ad::log(1.0 - p);
        }
        case Family::Godel: break;
    }
    throw UnsupportedConnective("this semantics has no additive generator");
}

}  // namespace detail

/// Lowers `f` to a graph computing g(truth(f)). Throws UnsupportedConnective
/// for semantics or connectives outside the generator-space fragment.
inline CompiledLoss compile(const fol::Formula& f, const tnorm::Semantics& sem,
                            int domain_size = 2) {
    if (domain_size < 1) throw DomainError("domain size must be at least 1");
    if (tnorm::is_table_only(sem))
        throw UnsupportedConnective(
            "loss compilation needs an additive generator; the minimum t-norm has "
            "none");

    struct Builder {
        ad::ExprGraph& g;
        const tnorm::Semantics& sem;
        int domain;
        bool nilpotent;
        detail::Env env;

        ad::Expr atom(const fol::Formula& f) {
            const int i = env.lookup(f.variable());
            const std::string name = f.kind() == fol::NodeKind::AnswerAtom
                                         ? sample_answer_input(i)
                                         : sample_task_input(i, f.predicate());
            return detail::emit_gen(g, g.input(name), sem);
        }

        ad::Expr constant(double v) {
            if (v == 1.0) return g.constant(0.0);
            if (v == 0.0) {
                if (!nilpotent)
                    throw DomainError(
                        "the constant 0 has no finite generator value under a strict "
                        "t-norm");
                return g.constant(tnorm::gen_zero(sem));
            }
            return g.constant(tnorm::gen(sem, v));
        }

        ad::Expr cap(ad::Expr e) {
            return nilpotent ? ad::min(e, g.constant(tnorm::gen_zero(sem))) : e;
        }

        ad::Expr walk(const fol::Formula& f) {
            using fol::Connective;
            switch (f.kind()) {
                case fol::NodeKind::ConstAtom: return constant(f.value());
                case fol::NodeKind::TaskAtom:
                case fol::NodeKind::AnswerAtom: return atom(f);
                case fol::NodeKind::Unary: {
                    if (f.connective() == Connective::ResidualNeg && nilpotent)
                        return g.constant(tnorm::gen_zero(sem)) - walk(f.body());
                    throw UnsupportedConnective(
                        std::string("connective '") +
                        fol::connective_token(f.connective()) +
                        "' has no generator-space form under this semantics");
                }
                case fol::NodeKind::Binary: {
                    // lhs first: input creation order must not depend on the
                    // host compiler's argument evaluation order
                    switch (f.connective()) {
                        case Connective::StrongConj: {
                            const ad::Expr a = walk(f.lhs());
                            return cap(a + walk(f.rhs()));
                        }
                        case Connective::WeakConj: {
                            const ad::Expr a = walk(f.lhs());
                            return ad::max(a, walk(f.rhs()));
                        }
                        case Connective::WeakDisj: {
                            const ad::Expr a = walk(f.lhs());
                            return ad::min(a, walk(f.rhs()));
                        }
                        case Connective::ResidualImpl: {
                            const ad::Expr a = walk(f.lhs());
                            return ad::clamp_lower(walk(f.rhs()) - a, 0.0);
                        }
                        case Connective::BiResidual: {
                            const ad::Expr a = walk(f.lhs());
                            return ad::abs(a - walk(f.rhs()));
                        }
                        default:
                            throw UnsupportedConnective(
                                std::string("connective '") +
                                fol::connective_token(f.connective()) +
                                "' has no generator-space form");
                    }
                }
                case fol::NodeKind::ForAll: {
                    ad::Expr sum = instantiate(f, 0);
                    for (int i = 1; i < domain; ++i) sum = sum + instantiate(f, i);
                    return cap(sum);
                }
                case fol::NodeKind::Exists: {
                    ad::Expr best = instantiate(f, 0);
                    for (int i = 1; i < domain; ++i)
                        best = ad::min(best, instantiate(f, i));
                    return best;
                }
            }
            throw ValidationError("unknown formula node");
        }

        ad::Expr instantiate(const fol::Formula& q, int i) {
            env.frames.emplace_back(q.variable(), i);
            ad::Expr e = walk(q.body());
            env.frames.pop_back();
            return e;
        }
    };

    CompiledLoss out;
    out.graph = std::make_shared<ad::ExprGraph>();
    out.semantics = sem;
    out.domain_size = domain_size;
    Builder b{*out.graph, sem, domain_size, tnorm::is_nilpotent(sem), {}};
    out.root = b.walk(f);
    return out;
}

}  // namespace logicloss::compiler
