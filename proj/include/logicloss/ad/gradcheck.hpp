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

// Central-difference verification of reverse-mode gradients. Piecewise ops
// (min, max, abs, clamp_lower) are checked for proximity to their switching
// point at the evaluation site; a report taken near a kink is marked, since
// finite differences straddle the corner there and the comparison is
// meaningless rather than wrong.

#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "logicloss/ad/graph.hpp"

namespace logicloss::ad {

struct GradientEntry {
    std::string input;
    double analytic = 0.0;
    double numeric = 0.0;
    double rel_err = 0.0;
};

struct GradientReport {
    std::vector<GradientEntry> entries;
    double max_rel_err = 0.0;
    bool near_kink = false;  // a piecewise op switches within the probe radius
    bool pass = false;       // max_rel_err <= tol and not near a kink
    double h = 0.0;
    double tol = 0.0;
};

namespace detail {

inline bool probes_a_kink(const Evaluator& ev, double margin) {
    const std::vector<Node>& nodes = ev.graph().nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Node& n = nodes[i];
        switch (n.op) {
            case Op::Min:
            case Op::Max:
                if (std::fabs(ev.value(n.a) - ev.value(n.b)) < margin) return true;
                break;
            case Op::Abs:
                if (std::fabs(ev.value(n.a)) < margin) return true;
                break;
            case Op::ClampLower:
                if (std::fabs(ev.value(n.a) - n.payload) < margin) return true;
                break;
            default: break;
        }
    }
    return false;
}

}  // namespace detail

/// Compares reverse-mode gradients against central differences at `at`.
/// Every graph input must be bound. The relative error scale is
/// max(|analytic|, |numeric|, 1e-8).
inline GradientReport finite_diff_check(
    Expr root, const std::unordered_map<std::string, double>& at, double h = 1e-5,
    double tol = 1e-4) {
    if (!root.valid()) throw Error("invalid expression");
    if (!(h > 0.0)) throw DomainError("probe step must be positive");
    const ExprGraph& g = *root.graph();

    Evaluator ev(g);
    detail::bind_all(ev, g, at);
    ev.forward(root);
    ev.backward(root);

    GradientReport report;
    report.h = h;
    report.tol = tol;
    // the probe moves each input by h; a generous slack on internal slopes
    report.near_kink = detail::probes_a_kink(ev, 8.0 * h);

    std::unordered_map<std::string, double> probe = at;
    for (const std::string& name : g.input_names()) {
        GradientEntry e;
        e.input = name;
        e.analytic = ev.input_gradient(name);
        const double x0 = at.at(name);
        probe[name] = x0 + h;
        const double up = eval_forward(root, probe);
        probe[name] = x0 - h;
        const double down = eval_forward(root, probe);
        probe[name] = x0;
        e.numeric = (up - down) / (2.0 * h);
        const double scale =
            std::max({std::fabs(e.analytic), std::fabs(e.numeric), 1e-8});
        e.rel_err = std::fabs(e.analytic - e.numeric) / scale;
        report.max_rel_err = std::max(report.max_rel_err, e.rel_err);
        report.entries.push_back(std::move(e));
    }
    report.pass = !report.near_kink && report.max_rel_err <= tol;
    return report;
}

}  // namespace logicloss::ad
