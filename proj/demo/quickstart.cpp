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

// A short tour: compile an entailment rule into a differentiable loss,
// train the toy classifier with and without the pair loss, and score both
// runs. Pass the rule-base directory as argv[1] (default "kb").

#include <iostream>
#include <string>

#include "logicloss/ad/graph.hpp"
#include "logicloss/compiler/compile.hpp"
#include "logicloss/fol/render.hpp"
#include "logicloss/kb/entailment.hpp"
#include "logicloss/metrics/metrics.hpp"
#include "logicloss/tnorm/semantics.hpp"
#include "logicloss/train/synthetic.hpp"
#include "logicloss/train/trainer.hpp"

using namespace logicloss;

int main(int argc, char** argv) {
    const std::string kb_dir = argc > 1 ? argv[1] : "kb";
    try {
        const auto base = kb::EntailmentKB::load(kb_dir);
        std::cout << "rule base: " << base.vocab().size() << " tasks, "
                  << base.rules().size() << " rules\n\n";

        // One rule lowered to generator space under two t-norms.
        const kb::EntailmentRule& rule = base.rules().front();
        std::cout << "rule: " << fol::render(rule.formula) << '\n';
        for (const auto& sem : {tnorm::Semantics::product(),
                                tnorm::Semantics::schweizer_sklar(2.0)}) {
            const auto loss = compiler::compile(rule.formula, sem, 2);
            std::cout << "  " << tnorm::to_string(sem.family)
                      << " loss: " << ad::to_prefix_string(loss.root) << '\n';
        }

        // Toy benchmark: one noisy synthetic world, three training modes.
        const auto records = train::generate_synthetic(base, 150, 7);
        const auto [train_set, test_set] = train::split_by_image(records, 100);
        std::cout << "\nsynthetic data: " << train_set.size() << " train / "
                  << test_set.size() << " test records\n";

        for (const char* mode : {"original", "logic"}) {
            train::TrainConfig cfg;
            cfg.mode = train::parse_mode(mode);
            cfg.epochs = 8;
            const auto result = train::train(cfg, train_set, &base);
            const auto preds =
                train::predict(result.params, result.answer_vocab, test_set);
            const auto rep = metrics::evaluate(preds, test_set, base);
            std::cout << '\n' << mode << " after " << cfg.epochs << " epochs:\n"
                      << metrics::report_table(rep);
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
