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

// ── Batch losses over model outputs ─────────────────────────────────────────
//
// Three losses over a batch of per-sample outputs, all in generator space:
//
//   supervised            Σ_i g(p_i)          p_i = gold answer/task prob
//   pair consistency      max{0, g(pa1) + g(pa2) - g(R*) - g(pt1) - g(pt2)}
//   total                 β Σ_{i≠j} pair(i,j) + supervised_ans + supervised_tsk
//
// R* is the best-satisfied entailment rule over the ordered pair's task
// probabilities. The pair loss reads: the answers may jointly miss at most
// as much mass as the weakest link in "these two samples are related tasks,
// correctly recognized" explains away.
//
// Every loss has a scalar form (plain doubles, infinity-safe) and the total
// also has a graph form over probability inputs for gradient work. Graph
// inputs per sample i extend the compile() scheme with
//   s<i>.gtsk   probability the model puts on sample i's gold task
// so the graph's shape depends only on the batch size, not on which answers
// or tasks are gold.

#include <cmath>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "logicloss/ad/graph.hpp"
#include "logicloss/compiler/compile.hpp"
#include "logicloss/errors.hpp"
#include "logicloss/kb/entailment.hpp"
#include "logicloss/tnorm/semantics.hpp"

namespace logicloss::compiler {

enum class Supervision { Answer, Task };

/// Σ g(gold probability) over the batch. Infinite when a gold probability is
/// zero under a strict t-norm.
inline double supervised_loss(std::span<const SampleOutputs> samples,
                              Supervision which, const tnorm::Semantics& sem) {
    double acc = 0.0;
    for (const SampleOutputs& s : samples)
        acc += tnorm::gen(sem, which == Supervision::Answer ? s.gold_answer_prob()
                                                            : s.gold_task_prob());
    return acc;
}

/// Consistency loss of the ordered pair (a, b) against the rule base.
/// With `include_task_antecedent` the pair is only held accountable to the
/// extent both samples' gold tasks are recognized.
inline double pair_consistency_loss(const SampleOutputs& a, const SampleOutputs& b,
                                    const kb::EntailmentKB& base,
                                    const tnorm::Semantics& sem,
                                    bool include_task_antecedent = true) {
    const auto best = base.best_relation_truth(a.task_probs, b.task_probs, sem);
    const double need =
        tnorm::gen(sem, a.gold_answer_prob()) + tnorm::gen(sem, b.gold_answer_prob());
    double have = tnorm::gen(sem, best.truth);
    if (include_task_antecedent)
        have += tnorm::gen(sem, a.gold_task_prob()) + tnorm::gen(sem, b.gold_task_prob());
    return std::max(0.0, tnorm::ext_sub(need, have));
}

struct LossBreakdown {
    double answer = 0.0;
    double task = 0.0;
    double pairs = 0.0;  // sum over ordered pairs, before the β weight
    double total = 0.0;
    int pair_count = 0;
};

/// β Σ_{i≠j} pair(i, j) + supervised answer + supervised task.
inline LossBreakdown total_loss(std::span<const SampleOutputs> samples,
                                const kb::EntailmentKB& base,
                                const tnorm::Semantics& sem, double beta = 1.0,
                                bool include_task_antecedent = true) {
    LossBreakdown out;
    out.answer = supervised_loss(samples, Supervision::Answer, sem);
    out.task = supervised_loss(samples, Supervision::Task, sem);
    for (std::size_t i = 0; i < samples.size(); ++i)
        for (std::size_t j = 0; j < samples.size(); ++j)
            if (i != j) {
                out.pairs += pair_consistency_loss(samples[i], samples[j], base, sem,
                                                   include_task_antecedent);
                ++out.pair_count;
            }
    out.total = beta * out.pairs + out.answer + out.task;
    return out;
}

/// Input name for sample i's gold-task probability.
inline std::string sample_gold_task_input(int i) {
    return "s" + std::to_string(i) + ".gtsk";
}

/// Shape of a loss graph: how many samples, which of them form the pair
/// prefix, and which supervised terms are present. Answer supervision is
/// always on; the task term and the pair block are optional so one builder
/// serves every training regime.
struct TotalLossSpec {
    int n_samples = 16;
    int pair_prefix = 0;  // ordered pairs among the first k samples
    bool task_supervision = true;
    double beta = 1.0;
    bool include_task_antecedent = true;
};

/// The total loss lowered to one graph; components share subexpressions.
struct TotalLossGraph {
    std::shared_ptr<ad::ExprGraph> graph;
    ad::Expr total;
    ad::Expr answer;
    ad::Expr task;   // constant 0 without task supervision
    ad::Expr pairs;  // constant 0 when the pair prefix is under 2
    tnorm::Semantics semantics;
    TotalLossSpec spec;
};

/// Builds a loss graph for a fixed batch shape. The graph depends on the
/// shape, rule base, and semantics only; gold choices enter through the
/// s<i>.ans and s<i>.gtsk inputs at evaluation time. `base` may be null
/// when the spec has no pair block.
inline TotalLossGraph build_loss_graph(const TotalLossSpec& spec,
                                       const kb::EntailmentKB* base,
                                       const tnorm::Semantics& sem) {
    if (spec.n_samples < 1) throw ValidationError("batch size must be at least 1");
    if (spec.pair_prefix < 0 || spec.pair_prefix > spec.n_samples)
        throw ValidationError("pair prefix must lie within the batch");
    if (spec.beta < 0.0) throw ValidationError("beta must be nonnegative");
    const bool with_pairs = spec.pair_prefix >= 2;
    if (spec.pair_prefix >= 1 && base == nullptr)
        throw ValidationError("a rule base is required for pair terms");
    if (tnorm::is_table_only(sem))
        throw UnsupportedConnective(
            "loss compilation needs an additive generator; the minimum t-norm has "
            "none");

    TotalLossGraph out;
    out.graph = std::make_shared<ad::ExprGraph>();
    out.semantics = sem;
    out.spec = spec;
    ad::ExprGraph& g = *out.graph;
    const std::size_t n = static_cast<std::size_t>(spec.n_samples);
    const std::size_t prefix = static_cast<std::size_t>(spec.pair_prefix);
    const bool with_gold_task =
        spec.task_supervision || (with_pairs && spec.include_task_antecedent);

    std::vector<ad::Expr> gen_ans(n);
    std::vector<ad::Expr> gen_gold(n);
    std::vector<std::vector<ad::Expr>> gen_task(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int idx = static_cast<int>(i);
        gen_ans[i] = detail::emit_gen(g, g.input(sample_answer_input(idx)), sem);
        if (with_gold_task)
            gen_gold[i] =
                detail::emit_gen(g, g.input(sample_gold_task_input(idx)), sem);
        if (i < prefix) {
            const std::size_t n_tasks = base->vocab().size();
            gen_task[i].reserve(n_tasks);
            for (std::size_t t = 0; t < n_tasks; ++t)
                gen_task[i].push_back(detail::emit_gen(
                    g,
                    g.input(sample_task_input(idx,
                                              base->vocab().name(static_cast<int>(t)))),
                    sem));
        }
    }

    ad::Expr answer = gen_ans[0];
    for (std::size_t i = 1; i < n; ++i) answer = answer + gen_ans[i];

    ad::Expr task = g.constant(0.0);
    if (spec.task_supervision) {
        task = gen_gold[0];
        for (std::size_t i = 1; i < n; ++i) task = task + gen_gold[i];
    }

    // min over rules of the rule's generator-space loss, then one hinge per
    // ordered pair in the prefix
    ad::Expr pairs = g.constant(0.0);
    if (with_pairs) {
        const auto rule_term = [&](const kb::EntailmentRule& r, std::size_t i,
                                   std::size_t j) {
            const ad::Expr src = gen_task[i][static_cast<std::size_t>(r.src)];
            const ad::Expr dst = gen_task[j][static_cast<std::size_t>(r.dst)];
            if (r.conn == fol::Connective::ResidualImpl)
                return ad::clamp_lower(dst - src, 0.0);
            return ad::abs(src - dst);
        };
        bool any_pair = false;
        for (std::size_t i = 0; i < prefix; ++i)
            for (std::size_t j = 0; j < prefix; ++j) {
                if (i == j) continue;
                ad::Expr best = rule_term(base->rules()[0], i, j);
                for (std::size_t k = 1; k < base->rules().size(); ++k)
                    best = ad::min(best, rule_term(base->rules()[k], i, j));
                ad::Expr have = best;
                if (spec.include_task_antecedent)
                    have = have + gen_gold[i] + gen_gold[j];
                const ad::Expr term =
                    ad::clamp_lower(gen_ans[i] + gen_ans[j] - have, 0.0);
                pairs = any_pair ? pairs + term : term;
                any_pair = true;
            }
    }

    out.answer = answer;
    out.task = task;
    out.pairs = pairs;
    out.total = spec.beta * pairs + answer + task;
    return out;
}

/// Full-batch variant: every ordered pair couples, both supervised terms on.
inline TotalLossGraph build_total_loss_graph(int n_samples,
                                             const kb::EntailmentKB& base,
                                             const tnorm::Semantics& sem,
                                             double beta = 1.0,
                                             bool include_task_antecedent = true) {
    TotalLossSpec spec;
    spec.n_samples = n_samples;
    spec.pair_prefix = n_samples < 1 ? 0 : n_samples;
    spec.task_supervision = true;
    spec.beta = beta;
    spec.include_task_antecedent = include_task_antecedent;
    if (n_samples < 1) throw ValidationError("batch size must be at least 1");
    return build_loss_graph(spec, &base, sem);
}

/// Name → value map feeding a total-loss graph (or any compile() graph whose
/// domain indices are batch positions).
inline std::unordered_map<std::string, double> sample_input_map(
    std::span<const SampleOutputs> samples, const TaskVocab& vocab,
    bool with_gold_task = true) {
    std::unordered_map<std::string, double> at;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const SampleOutputs& s = samples[i];
        if (s.task_probs.size() != vocab.size())
            throw ShapeMismatch("task probability vector does not match the vocabulary");
        const int idx = static_cast<int>(i);
        at[sample_answer_input(idx)] = s.gold_answer_prob();
        if (with_gold_task) at[sample_gold_task_input(idx)] = s.gold_task_prob();
        for (std::size_t t = 0; t < vocab.size(); ++t)
            at[sample_task_input(idx, vocab.name(static_cast<int>(t)))] =
                s.task_probs[t];
    }
    return at;
}

/// Binds every per-sample input of `ev`'s graph from the batch outputs.
inline void bind_sample_outputs(ad::Evaluator& ev,
                                std::span<const SampleOutputs> samples,
                                const TaskVocab& vocab,
                                bool with_gold_task = true) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const SampleOutputs& s = samples[i];
        if (s.task_probs.size() != vocab.size())
            throw ShapeMismatch("task probability vector does not match the vocabulary");
        const int idx = static_cast<int>(i);
        ev.set_input(sample_answer_input(idx), s.gold_answer_prob());
        if (with_gold_task) ev.set_input(sample_gold_task_input(idx), s.gold_task_prob());
        for (std::size_t t = 0; t < vocab.size(); ++t)
            ev.set_input(sample_task_input(idx, vocab.name(static_cast<int>(t))),
                         s.task_probs[t]);
    }
}

}  // namespace logicloss::compiler
