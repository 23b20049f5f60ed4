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

// Two-head classifier over fixed feature vectors: a shared tanh encoder, a
// softmax answer head, and a softmax task head behind one 16-wide FC layer.
//
// The forward pass is expressed on the autodiff tape, so training gradients
// flow through the same graph machinery as the loss. Parameter and feature
// slots occupy two contiguous input ranges at the front of the graph, which
// lets an evaluator rebind either block in one sweep.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "logicloss/ad/graph.hpp"
#include "logicloss/compiler/compile.hpp"
#include "logicloss/detail/rng.hpp"
#include "logicloss/errors.hpp"

namespace logicloss::train {

struct ModelDims {
    int features = 16;
    int hidden = 64;       // shared encoder width
    int task_hidden = 16;  // FC layer in front of the task head
    int answers = 0;       // answer vocabulary size; set from data
    int tasks = 48;
};

inline bool operator==(const ModelDims& a, const ModelDims& b) {
    return a.features == b.features && a.hidden == b.hidden &&
           a.task_hidden == b.task_hidden && a.answers == b.answers &&
           a.tasks == b.tasks;
}

/// Offsets of each weight block inside the flat parameter vector.
/// Weights are row-major: w1[j * features + k] feeds hidden unit j.
struct ParamLayout {
    std::size_t w1 = 0, b1 = 0, wa = 0, ba = 0;
    std::size_t wt1 = 0, bt1 = 0, wt2 = 0, bt2 = 0;
    std::size_t total = 0;

    explicit ParamLayout(const ModelDims& d) {
        const auto f = static_cast<std::size_t>(d.features);
        const auto h = static_cast<std::size_t>(d.hidden);
        const auto th = static_cast<std::size_t>(d.task_hidden);
        const auto a = static_cast<std::size_t>(d.answers);
        const auto t = static_cast<std::size_t>(d.tasks);
        w1 = 0;
        b1 = w1 + h * f;
        wa = b1 + h;
        ba = wa + a * h;
        wt1 = ba + a;
        bt1 = wt1 + th * h;
        wt2 = bt1 + th;
        bt2 = wt2 + t * th;
        total = bt2 + t;
    }
};

struct ModelParams {
    ModelDims dims;
    std::vector<double> values;
};

inline void check_dims(const ModelDims& d) {
    if (d.features < 1 || d.hidden < 1 || d.task_hidden < 1 || d.answers < 2 ||
        d.tasks < 2)
        throw ValidationError("model dimensions must be positive (answers >= 2)");
}

/// Weights drawn from N(0, 1/sqrt(fan_in)), biases zero.
inline ModelParams init_params(const ModelDims& dims, std::uint64_t seed) {
    check_dims(dims);
    const ParamLayout lay(dims);
    ModelParams p{dims, std::vector<double>(lay.total, 0.0)};
    std::mt19937_64 rng(logicloss::detail::derive_seed(seed, 0x70617261u));
    const auto fill = [&](std::size_t at, std::size_t n, int fan_in) {
        const double s = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (std::size_t k = 0; k < n; ++k)
            p.values[at + k] = s * logicloss::detail::gaussian(rng);
    };
    fill(lay.w1, static_cast<std::size_t>(dims.hidden * dims.features),
         dims.features);
    fill(lay.wa, static_cast<std::size_t>(dims.answers * dims.hidden), dims.hidden);
    fill(lay.wt1, static_cast<std::size_t>(dims.task_hidden * dims.hidden),
         dims.hidden);
    fill(lay.wt2, static_cast<std::size_t>(dims.tasks * dims.task_hidden),
         dims.task_hidden);
    return p;
}

/// The classifier lowered to one tape. Parameter inputs sit at node ids
/// [param_base, param_base + layout.total) in layout order, features right
/// after them, so both bind as ranges.
struct ModelGraph {
    ModelDims dims;
    ParamLayout layout;
    ad::ExprGraph graph;
    ad::NodeId param_base = 0;
    ad::NodeId feature_base = 0;
    std::vector<ad::NodeId> answer_probs;
    std::vector<ad::NodeId> task_probs;

    explicit ModelGraph(const ModelDims& d) : dims(d), layout(d) {
        check_dims(d);
        std::vector<ad::Expr> params;
        params.reserve(layout.total);
        for (std::size_t k = 0; k < layout.total; ++k)
            params.push_back(graph.input("p" + std::to_string(k)));
        param_base = params.front().id();
        std::vector<ad::Expr> x;
        x.reserve(static_cast<std::size_t>(d.features));
        for (int k = 0; k < d.features; ++k)
            x.push_back(graph.input("x" + std::to_string(k)));
        feature_base = x.front().id();

        const ad::Expr c_one = graph.constant(1.0);
        const ad::Expr c_cap = graph.constant(20.0);
        const ad::Expr c_two = graph.constant(2.0);
        // tanh through exp, with the argument capped at +-20 so exp stays
        // finite; the cap region carries zero gradient, matching saturation
        const auto tanh_of = [&](ad::Expr z) {
            const ad::Expr zc = graph.min(graph.clamp_lower(z, -20.0), c_cap);
            const ad::Expr e = graph.exp(zc * c_two);
            const ad::Expr num = e - c_one;
            const ad::Expr den = e + c_one;
            return num / den;
        };
        const auto dot = [&](std::size_t w_at, std::size_t b_at, int row,
                             std::span<const ad::Expr> in) {
            ad::Expr acc = params[b_at + static_cast<std::size_t>(row)];
            const std::size_t base =
                w_at + static_cast<std::size_t>(row) * in.size();
            for (std::size_t k = 0; k < in.size(); ++k)
                acc = acc + params[base + k] * in[k];
            return acc;
        };
        const auto softmax = [&](std::span<const ad::Expr> z,
                                 std::vector<ad::NodeId>& out) {
            ad::Expr m = z[0];
            for (std::size_t i = 1; i < z.size(); ++i) m = graph.max(m, z[i]);
            std::vector<ad::Expr> e;
            e.reserve(z.size());
            for (const ad::Expr& zi : z) e.push_back(graph.exp(zi - m));
            ad::Expr s = e[0];
            for (std::size_t i = 1; i < e.size(); ++i) s = s + e[i];
            out.reserve(z.size());
            for (const ad::Expr& ei : e) out.push_back((ei / s).id());
        };

        std::vector<ad::Expr> h;
        h.reserve(static_cast<std::size_t>(d.hidden));
        for (int j = 0; j < d.hidden; ++j)
            h.push_back(tanh_of(dot(layout.w1, layout.b1, j, x)));

        std::vector<ad::Expr> za;
        za.reserve(static_cast<std::size_t>(d.answers));
        for (int i = 0; i < d.answers; ++i)
            za.push_back(dot(layout.wa, layout.ba, i, h));
        softmax(za, answer_probs);

        std::vector<ad::Expr> t1;
        t1.reserve(static_cast<std::size_t>(d.task_hidden));
        for (int j = 0; j < d.task_hidden; ++j)
            t1.push_back(tanh_of(dot(layout.wt1, layout.bt1, j, h)));
        std::vector<ad::Expr> zt;
        zt.reserve(static_cast<std::size_t>(d.tasks));
        for (int i = 0; i < d.tasks; ++i)
            zt.push_back(dot(layout.wt2, layout.bt2, i, t1));
        softmax(zt, task_probs);
    }

    void bind_params(ad::Evaluator& ev, const ModelParams& p) const {
        if (!(p.dims == dims) || p.values.size() != layout.total)
            throw ShapeMismatch("parameter vector does not fit the model");
        ev.set_input_range(param_base, p.values);
    }
    void bind_features(ad::Evaluator& ev, std::span<const double> x) const {
        if (x.size() != static_cast<std::size_t>(dims.features))
            throw ShapeMismatch("expected " + std::to_string(dims.features) +
                                " features, got " + std::to_string(x.size()));
        ev.set_input_range(feature_base, x);
    }
};

/// One-shot forward pass; builds a throwaway graph. Training and bulk
/// prediction keep a ModelGraph plus evaluator instead.
inline compiler::SampleOutputs forward(const ModelParams& params,
                                       std::span<const double> features) {
    const ModelGraph mg(params.dims);
    ad::Evaluator ev(mg.graph);
    mg.bind_params(ev, params);
    mg.bind_features(ev, features);
    ev.forward();
    compiler::SampleOutputs out;
    out.answer_probs.reserve(mg.answer_probs.size());
    for (ad::NodeId id : mg.answer_probs) out.answer_probs.push_back(ev.value(id));
    out.task_probs.reserve(mg.task_probs.size());
    for (ad::NodeId id : mg.task_probs) out.task_probs.push_back(ev.value(id));
    return out;
}

inline std::uint64_t model_schema_hash(const ModelDims& d) {
    const std::string key = "logicloss-model-v1|f" + std::to_string(d.features) +
                            "|h" + std::to_string(d.hidden) + "|th" +
                            std::to_string(d.task_hidden) + "|a" +
                            std::to_string(d.answers) + "|t" +
                            std::to_string(d.tasks);
    return logicloss::detail::fnv1a64(key);
}

/// Versioned JSON checkpoint; the schema hash pins the layout so stale or
/// hand-edited files fail loudly instead of loading skewed weights.
inline void save_model(const std::string& path, const ModelParams& params,
                       std::span<const std::string> answer_vocab) {
    nlohmann::json j;
    j["format"] = "logicloss-model-v1";
    j["features"] = params.dims.features;
    j["hidden"] = params.dims.hidden;
    j["task_hidden"] = params.dims.task_hidden;
    j["answers"] = params.dims.answers;
    j["tasks"] = params.dims.tasks;
    j["schema"] = model_schema_hash(params.dims);
    j["answer_vocab"] = std::vector<std::string>(answer_vocab.begin(),
                                                 answer_vocab.end());
    j["params"] = params.values;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open model file for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("short write to model file: " + path);
}

struct LoadedModel {
    ModelParams params;
    std::vector<std::string> answer_vocab;
};

inline LoadedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
        if (j.at("format").get<std::string>() != "logicloss-model-v1")
            throw DataFileCorrupt(path + ": unknown model format");
        LoadedModel m;
        m.params.dims.features = j.at("features").get<int>();
        m.params.dims.hidden = j.at("hidden").get<int>();
        m.params.dims.task_hidden = j.at("task_hidden").get<int>();
        m.params.dims.answers = j.at("answers").get<int>();
        m.params.dims.tasks = j.at("tasks").get<int>();
        if (j.at("schema").get<std::uint64_t>() !=
            model_schema_hash(m.params.dims))
            throw DataFileCorrupt(path + ": schema hash mismatch");
        m.answer_vocab = j.at("answer_vocab").get<std::vector<std::string>>();
        m.params.values = j.at("params").get<std::vector<double>>();
        check_dims(m.params.dims);
        if (m.params.values.size() != ParamLayout(m.params.dims).total)
            throw DataFileCorrupt(path + ": parameter count mismatch");
        if (m.answer_vocab.size() !=
            static_cast<std::size_t>(m.params.dims.answers))
            throw DataFileCorrupt(path + ": answer vocabulary size mismatch");
        for (double v : m.params.values)
            if (!std::isfinite(v))
                throw DataFileCorrupt(path + ": non-finite parameter");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataFileCorrupt(path + ": " + e.what());
    }
}

}  // namespace logicloss::train
