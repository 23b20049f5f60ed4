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

// Gradient-descent training over the compiled loss.
//
// Three regimes share one loop:
//   original  uniform random batches, answer supervision only
//   hybrid    hybrid batches, answer supervision (task head too with duo_task)
//   logic     hybrid batches, answer + task supervision + the pair loss over
//             the family prefix, weighted by beta
//
// Each batch slot keeps its own evaluator over the shared model tape, so the
// forward states of all samples survive until the coupling loss has been
// differentiated; the coupling's input adjoints then seed each slot's reverse
// sweep, and parameter gradients accumulate in slot order. Every gradient in
// the process comes off a tape.
//
// Batches are redrawn every epoch from a seed derived from (seed, epoch);
// training is a pure function of (records, config).

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "logicloss/ad/graph.hpp"
#include "logicloss/compiler/compile.hpp"
#include "logicloss/compiler/losses.hpp"
#include "logicloss/data/batcher.hpp"
#include "logicloss/data/predictions.hpp"
#include "logicloss/data/record.hpp"
#include "logicloss/detail/numfmt.hpp"
#include "logicloss/detail/rng.hpp"
#include "logicloss/errors.hpp"
#include "logicloss/kb/entailment.hpp"
#include "logicloss/kb/task_names.hpp"
#include "logicloss/train/model.hpp"
#include "logicloss/tnorm/semantics.hpp"

namespace logicloss::train {

enum class Mode { Original, Hybrid, Logic };

inline const char* mode_name(Mode m) {
    switch (m) {
        case Mode::Original: return "original";
        case Mode::Hybrid: return "hybrid";
        case Mode::Logic: return "logic";
    }
    return "?";
}

inline Mode parse_mode(std::string_view s) {
    if (s == "original") return Mode::Original;
    if (s == "hybrid") return Mode::Hybrid;
    if (s == "logic") return Mode::Logic;
    throw ValidationError("unknown training mode: " + std::string(s));
}

struct TrainConfig {
    Mode mode = Mode::Logic;
    double beta = 1.0;
    tnorm::Semantics semantics = tnorm::Semantics::product();
    double learning_rate = 1e-4;
    int epochs = 60;
    std::size_t batch_size = 16;
    std::uint64_t seed = 42;
    bool duo_task = false;  // hybrid only: also supervise the task head
    int hidden = 64;
};

/// Per-epoch training-set means; losses are per sample.
struct EpochRow {
    int epoch = 0;
    double answer_loss = 0.0;
    double task_loss = 0.0;
    double logic_loss = 0.0;
    double answer_acc = 0.0;
    double task_acc = 0.0;
};

struct TrainResult {
    ModelParams params;
    std::vector<std::string> answer_vocab;
    std::vector<EpochRow> curves;
};

/// Sums a single batch contributes to the epoch row.
struct StepStats {
    double answer = 0.0;  // supervised answer loss, batch sum
    double task = 0.0;    // supervised task loss, batch sum
    double pairs = 0.0;   // unweighted pair loss, batch sum
    double total = 0.0;
    int correct_answers = 0;
    int correct_tasks = 0;
    std::size_t samples = 0;
};

/// The task vocabulary every trained model predicts over.
inline compiler::TaskVocab builtin_task_vocab() {
    std::vector<std::string> names;
    names.reserve(kb::kTaskNames.size());
    for (std::string_view n : kb::kTaskNames) names.emplace_back(n);
    return compiler::TaskVocab(names);
}

/// Sorted unique gold answers; the answer head's output space.
inline std::vector<std::string> collect_answer_vocab(
    std::span<const data::QuestionRecord> records) {
    std::vector<std::string> v;
    v.reserve(records.size());
    for (const data::QuestionRecord& r : records) v.push_back(r.gold_answer);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

class Trainer {
public:
    Trainer(const TrainConfig& cfg, std::span<const data::QuestionRecord> records,
            const kb::EntailmentKB* base)
        : cfg_(cfg),
          records_(records),
          base_(base),
          task_vocab_(builtin_task_vocab()) {
        if (cfg.epochs < 1) throw ValidationError("epochs must be positive");
        if (cfg.batch_size < 1) throw ValidationError("batch size must be positive");
        if (cfg.learning_rate < 0.0)
            throw ValidationError("learning rate must be nonnegative");
        if (cfg.beta < 0.0) throw ValidationError("beta must be nonnegative");
        if (cfg.mode == Mode::Logic && base == nullptr)
            throw ValidationError("logic mode needs the rule base");
        if (records.empty()) throw ValidationError("no training records");

        answer_vocab_ = collect_answer_vocab(records);
        const int feat = static_cast<int>(records[0].features.size());
        gold_answer_.reserve(records.size());
        gold_task_.reserve(records.size());
        for (const data::QuestionRecord& r : records) {
            if (static_cast<int>(r.features.size()) != feat || feat == 0)
                throw ShapeMismatch("record " + r.id +
                                    " has no usable feature vector");
            const auto it = std::lower_bound(answer_vocab_.begin(),
                                             answer_vocab_.end(), r.gold_answer);
            gold_answer_.push_back(
                static_cast<int>(it - answer_vocab_.begin()));
            gold_task_.push_back(task_vocab_.index(r.task));
        }

        ModelDims dims;
        dims.features = feat;
        dims.hidden = cfg.hidden;
        dims.answers = static_cast<int>(answer_vocab_.size());
        model_ = std::make_unique<ModelGraph>(dims);
        params_ = init_params(dims, cfg.seed);
        grad_.assign(model_->layout.total, 0.0);
        for (std::size_t i = 0; i < cfg.batch_size; ++i)
            slots_.emplace_back(model_->graph);

        families_ = data::group_families(records);
    }

    const ModelParams& params() const { return params_; }
    ModelParams& params() { return params_; }
    const std::vector<std::string>& answer_vocab() const { return answer_vocab_; }
    std::size_t batches_per_epoch() const { return families_.size(); }

    /// Member-index batches for one epoch, plus each batch's family prefix
    /// length (zero outside logic mode).
    std::vector<std::pair<std::vector<std::size_t>, std::size_t>> epoch_batches(
        int epoch) const {
        const std::uint64_t s = logicloss::detail::derive_seed(
            logicloss::detail::derive_seed(cfg_.seed, 0x62617463u),
            static_cast<std::uint64_t>(epoch));
        std::vector<std::pair<std::vector<std::size_t>, std::size_t>> out;
        if (cfg_.mode == Mode::Original) {
            if (records_.size() < cfg_.batch_size)
                throw PoolTooSmall("pool of " + std::to_string(records_.size()) +
                                   " records cannot fill a batch of " +
                                   std::to_string(cfg_.batch_size));
            std::mt19937_64 rng(s);
            out.reserve(families_.size());
            for (std::size_t b = 0; b < families_.size(); ++b) {
                std::vector<std::size_t> members;
                members.reserve(cfg_.batch_size);
                while (members.size() < cfg_.batch_size) {
                    const auto c = static_cast<std::size_t>(
                        logicloss::detail::uniform_index(rng, records_.size()));
                    if (std::find(members.begin(), members.end(), c) ==
                        members.end())
                        members.push_back(c);
                }
                out.emplace_back(std::move(members), 0);
            }
            return out;
        }
        const auto batches = data::build_hybrid_batches(families_, records_,
                                                        cfg_.batch_size, s);
        out.reserve(batches.size());
        for (const data::HybridBatch& b : batches)
            out.emplace_back(b.members, cfg_.mode == Mode::Logic ? b.family_size
                                                                 : std::size_t{0});
        return out;
    }

    /// Forward + reverse over one batch; gradients land in an internal
    /// buffer read back through gradient(). No parameter update.
    StepStats compute(std::span<const std::size_t> members,
                      std::size_t family_prefix) {
        StepStats st = forward_batch(members, family_prefix, true);
        Coupling& c = *active_;
        c.ev.backward(c.tg.total);
        std::fill(grad_.begin(), grad_.end(), 0.0);
        for (std::size_t i = 0; i < members.size(); ++i) {
            seeds_.clear();
            const std::size_t r = members[i];
            seeds_.emplace_back(
                model_->answer_probs[static_cast<std::size_t>(
                    gold_answer_[r])],
                c.ev.adjoint(c.ans[i]));
            if (c.has_gtsk)
                seeds_.emplace_back(
                    model_->task_probs[static_cast<std::size_t>(gold_task_[r])],
                    c.ev.adjoint(c.gtsk[i]));
            if (i < c.tsk.size())
                for (std::size_t t = 0; t < c.tsk[i].size(); ++t)
                    seeds_.emplace_back(model_->task_probs[t],
                                        c.ev.adjoint(c.tsk[i][t]));
            slots_[i].backward_seeded(seeds_);
            const std::span<const double> adj = slots_[i].adjoints();
            const std::size_t base = static_cast<std::size_t>(model_->param_base);
            for (std::size_t k = 0; k < grad_.size(); ++k)
                grad_[k] += adj[base + k];
        }
        return st;
    }

    /// One SGD step on one batch.
    StepStats step(std::span<const std::size_t> members,
                   std::size_t family_prefix) {
        StepStats st = compute(members, family_prefix);
        for (std::size_t k = 0; k < grad_.size(); ++k)
            params_.values[k] -= cfg_.learning_rate * grad_[k];
        return st;
    }

    /// Batch loss under the current parameters, forward only.
    double loss(std::span<const std::size_t> members, std::size_t family_prefix) {
        return forward_batch(members, family_prefix, false).total;
    }

    /// d(batch loss)/d(parameters) from the latest compute()/step().
    std::span<const double> gradient() const { return grad_; }

    /// Smallest forward gap across the coupling loss's branching nodes at the
    /// current parameters; small gaps mean finite differences would straddle
    /// a kink. The model itself is smooth, so only the coupling is scanned.
    double kink_gap(std::span<const std::size_t> members,
                    std::size_t family_prefix) {
        forward_batch(members, family_prefix, false);
        const Coupling& c = *active_;
        const std::span<const double> v = c.ev.values();
        double best = std::numeric_limits<double>::infinity();
        const auto& nodes = c.tg.graph->nodes();
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const ad::Node& n = nodes[i];
            double gap = -1.0;
            switch (n.op) {
                case ad::Op::Min:
                case ad::Op::Max:
                    gap = std::abs(v[static_cast<std::size_t>(n.a)] -
                                   v[static_cast<std::size_t>(n.b)]);
                    break;
                case ad::Op::Abs:
                    gap = std::abs(v[static_cast<std::size_t>(n.a)]);
                    break;
                case ad::Op::ClampLower:
                    gap = std::abs(v[static_cast<std::size_t>(n.a)] - n.payload);
                    break;
                default: continue;
            }
            best = std::min(best, gap);
        }
        return best;
    }

    /// Answer and task argmaxes for the sample held in batch slot `i` after
    /// the latest forward.
    std::pair<int, int> slot_argmax(std::size_t i) const {
        const ad::Evaluator& e = slots_.at(i);
        const auto arg = [&](const std::vector<ad::NodeId>& probs) {
            int best = 0;
            double bv = e.value(probs[0]);
            for (std::size_t k = 1; k < probs.size(); ++k) {
                const double v = e.value(probs[k]);
                if (v > bv) {
                    bv = v;
                    best = static_cast<int>(k);
                }
            }
            return best;
        };
        return {arg(model_->answer_probs), arg(model_->task_probs)};
    }

private:
    struct Coupling {
        compiler::TotalLossGraph tg;
        ad::Evaluator ev;
        std::vector<ad::NodeId> ans;
        std::vector<ad::NodeId> gtsk;
        std::vector<std::vector<ad::NodeId>> tsk;  // prefix slots only
        bool has_gtsk = false;

        Coupling(const compiler::TotalLossSpec& spec,
                 const kb::EntailmentKB* base, const tnorm::Semantics& sem,
                 const compiler::TaskVocab& vocab)
            : tg(compiler::build_loss_graph(spec, base, sem)), ev(*tg.graph) {
            const auto n = static_cast<std::size_t>(spec.n_samples);
            has_gtsk =
                tg.graph->input_slot(compiler::sample_gold_task_input(0)) >= 0;
            for (std::size_t i = 0; i < n; ++i) {
                const int idx = static_cast<int>(i);
                ans.push_back(
                    tg.graph->input_slot(compiler::sample_answer_input(idx)));
                if (has_gtsk)
                    gtsk.push_back(tg.graph->input_slot(
                        compiler::sample_gold_task_input(idx)));
            }
            tsk.resize(static_cast<std::size_t>(spec.pair_prefix));
            for (std::size_t i = 0; i < tsk.size(); ++i) {
                tsk[i].reserve(vocab.size());
                for (std::size_t t = 0; t < vocab.size(); ++t)
                    tsk[i].push_back(tg.graph->input_slot(
                        compiler::sample_task_input(static_cast<int>(i),
                                                    vocab.name(static_cast<int>(t)))));
            }
        }
    };

    Coupling& coupling_for(std::size_t family_prefix) {
        const std::size_t key =
            cfg_.mode == Mode::Logic ? family_prefix : std::size_t{0};
        auto it = couplings_.find(key);
        if (it == couplings_.end()) {
            compiler::TotalLossSpec spec;
            spec.n_samples = static_cast<int>(cfg_.batch_size);
            spec.pair_prefix = static_cast<int>(key);
            spec.task_supervision =
                cfg_.mode == Mode::Logic ||
                (cfg_.mode == Mode::Hybrid && cfg_.duo_task);
            spec.beta = cfg_.beta;
            const compiler::TaskVocab& vocab =
                base_ != nullptr ? base_->vocab() : task_vocab_;
            it = couplings_
                     .try_emplace(key, spec, key > 0 ? base_ : nullptr,
                                  cfg_.semantics, vocab)
                     .first;
        }
        return it->second;
    }

    /// Runs the model on every batch member and the coupling loss on their
    /// outputs. `retain` keeps using one evaluator per slot (needed before a
    /// reverse sweep); otherwise slot 0 is reused for every sample.
    StepStats forward_batch(std::span<const std::size_t> members,
                            std::size_t family_prefix, bool retain) {
        if (members.size() != cfg_.batch_size)
            throw ValidationError("batch size mismatch");
        Coupling& c = coupling_for(family_prefix);
        active_ = &c;
        StepStats st;
        st.samples = members.size();
        for (std::size_t i = 0; i < members.size(); ++i) {
            ad::Evaluator& e = slots_[retain ? i : 0];
            if (retain || i == 0) model_->bind_params(e, params_);
            model_->bind_features(e, records_[members[i]].features);
            e.forward();
            const std::size_t r = members[i];
            c.ev.set_input(
                c.ans[i],
                e.value(model_->answer_probs[static_cast<std::size_t>(
                    gold_answer_[r])]));
            if (c.has_gtsk)
                c.ev.set_input(
                    c.gtsk[i],
                    e.value(model_->task_probs[static_cast<std::size_t>(
                        gold_task_[r])]));
            if (i < c.tsk.size())
                for (std::size_t t = 0; t < c.tsk[i].size(); ++t)
                    c.ev.set_input(c.tsk[i][t],
                                   e.value(model_->task_probs[t]));
            if (retain) {
                const auto [ans_arg, tsk_arg] = slot_argmax(i);
                if (ans_arg == gold_answer_[r]) ++st.correct_answers;
                if (tsk_arg == gold_task_[r]) ++st.correct_tasks;
            }
        }
        c.ev.forward();
        st.total = c.ev.value(c.tg.total.id());
        st.answer = c.ev.value(c.tg.answer.id());
        st.task = c.ev.value(c.tg.task.id());
        st.pairs = c.ev.value(c.tg.pairs.id());
        return st;
    }

    TrainConfig cfg_;
    std::span<const data::QuestionRecord> records_;
    const kb::EntailmentKB* base_;
    compiler::TaskVocab task_vocab_;
    std::vector<std::string> answer_vocab_;
    std::vector<int> gold_answer_;
    std::vector<int> gold_task_;
    std::vector<data::Family> families_;
    std::unique_ptr<ModelGraph> model_;
    ModelParams params_;
    std::vector<double> grad_;
    std::vector<ad::Evaluator> slots_;
    std::vector<std::pair<ad::NodeId, double>> seeds_;
    std::map<std::size_t, Coupling> couplings_;
    Coupling* active_ = nullptr;
};

/// Full training run; curves carry one row per epoch.
inline TrainResult train(const TrainConfig& cfg,
                         std::span<const data::QuestionRecord> records,
                         const kb::EntailmentKB* base = nullptr) {
    Trainer tr(cfg, records, base);
    TrainResult out;
    out.answer_vocab = tr.answer_vocab();
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto batches = tr.epoch_batches(epoch);
        EpochRow row;
        row.epoch = epoch;
        double samples = 0.0;
        for (std::size_t b = 0; b < batches.size(); ++b) {
            StepStats st;
            try {
                st = tr.step(batches[b].first, batches[b].second);
            } catch (const NonFiniteResult& e) {
                throw NonFiniteLoss(epoch, static_cast<int>(b), e.what());
            }
            row.answer_loss += st.answer;
            row.task_loss += st.task;
            row.logic_loss += st.pairs;
            row.answer_acc += st.correct_answers;
            row.task_acc += st.correct_tasks;
            samples += static_cast<double>(st.samples);
        }
        row.answer_loss /= samples;
        row.task_loss /= samples;
        row.logic_loss /= samples;
        row.answer_acc /= samples;
        row.task_acc /= samples;
        out.curves.push_back(row);
    }
    out.params = tr.params();
    return out;
}

/// Argmax predictions for every record; deterministic in (params, records).
inline std::vector<data::Prediction> predict(
    const ModelParams& params, std::span<const std::string> answer_vocab,
    std::span<const data::QuestionRecord> records) {
    if (static_cast<int>(answer_vocab.size()) != params.dims.answers)
        throw ShapeMismatch("answer vocabulary does not match the model");
    const ModelGraph mg(params.dims);
    ad::Evaluator ev(mg.graph);
    mg.bind_params(ev, params);
    std::vector<data::Prediction> out;
    out.reserve(records.size());
    for (const data::QuestionRecord& r : records) {
        mg.bind_features(ev, r.features);
        ev.forward();
        const auto arg = [&](const std::vector<ad::NodeId>& probs) {
            int best = 0;
            double bv = ev.value(probs[0]);
            for (std::size_t k = 1; k < probs.size(); ++k) {
                const double v = ev.value(probs[k]);
                if (v > bv) {
                    bv = v;
                    best = static_cast<int>(k);
                }
            }
            return best;
        };
        out.push_back(data::Prediction{
            r.id, std::string(answer_vocab[static_cast<std::size_t>(
                      arg(mg.answer_probs))]),
            std::string(kb::kTaskNames[static_cast<std::size_t>(
                arg(mg.task_probs))])});
    }
    return out;
}

/// Curves as CSV, one row per epoch.
inline void write_curves(const std::string& path,
                         std::span<const EpochRow> curves) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open curve file for writing: " + path);
    out << "epoch,answer_loss,task_loss,logic_loss,answer_acc,task_acc\n";
    for (const EpochRow& r : curves)
        out << r.epoch << ',' << logicloss::detail::format_double(r.answer_loss) << ','
            << logicloss::detail::format_double(r.task_loss) << ','
            << logicloss::detail::format_double(r.logic_loss) << ','
            << logicloss::detail::format_double(r.answer_acc) << ','
            << logicloss::detail::format_double(r.task_acc) << '\n';
    if (!out) throw IoError("short write to curve file: " + path);
}

}  // namespace logicloss::train
