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

// Command-line front end. Exit codes: 0 success, 1 validation or data
// errors, 2 usage errors. Diagnostics go to stderr, machine output to
// stdout or files. Flags beat LOGICLOSS_* environment variables, which
// beat built-in defaults.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "logicloss/ad/gradcheck.hpp"
#include "logicloss/compiler/compile.hpp"
#include "logicloss/data/batcher.hpp"
#include "logicloss/data/predictions.hpp"
#include "logicloss/data/record.hpp"
#include "logicloss/errors.hpp"
#include "logicloss/fol/parse.hpp"
#include "logicloss/fol/render.hpp"
#include "logicloss/kb/entailment.hpp"
#include "logicloss/kb/task_names.hpp"
#include "logicloss/metrics/metrics.hpp"
#include "logicloss/train/model.hpp"
#include "logicloss/train/synthetic.hpp"
#include "logicloss/train/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

logicloss::tnorm::Semantics semantics_from(const std::string& name,
                                           double lambda) {
    using logicloss::tnorm::Semantics;
    if (name == "godel") return Semantics::godel();
    if (name == "lukasiewicz") return Semantics::lukasiewicz();
    if (name == "product") return Semantics::product();
    if (name == "ss") return Semantics::schweizer_sklar(lambda);
    if (name == "frank") return Semantics::frank(lambda);
    throw logicloss::ValidationError(
        "unknown semantics '" + name +
        "' (expected godel, lukasiewicz, product, ss, or frank)");
}

json semantics_json(const logicloss::tnorm::Semantics& sem) {
    return json{{"family", logicloss::tnorm::to_string(sem.family)},
                {"lambda", sem.lambda}};
}

// A rule base directory, or the rules file inside one.
std::string kb_dir_from(const std::string& path) {
    fs::path p(path);
    if (fs::is_regular_file(p)) return p.parent_path().string();
    return path;
}

std::vector<std::string> builtin_task_names() {
    std::vector<std::string> names;
    names.reserve(logicloss::kb::kTaskNames.size());
    for (std::string_view n : logicloss::kb::kTaskNames) names.emplace_back(n);
    return names;
}

logicloss::fol::Formula parse_formula_arg(const std::string& text) {
    auto result = logicloss::fol::parse_formula(text, builtin_task_names());
    if (!result)
        throw logicloss::ValidationError("cannot parse formula: " +
                                         result.error().message);
    return std::move(result).value();
}

std::unordered_map<std::string, double> read_bindings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw logicloss::IoError("cannot open binding file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw logicloss::DataFileCorrupt(path + ": " + e.what());
    }
    if (!j.is_object())
        throw logicloss::DataFileCorrupt(path + ": bindings must be an object");
    std::unordered_map<std::string, double> out;
    for (const auto& [key, value] : j.items()) {
        if (!value.is_number())
            throw logicloss::DataFileCorrupt(path + ": binding '" + key +
                                             "' is not a number");
        out.emplace(key, value.get<double>());
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw logicloss::IoError("cannot open for writing: " + path);
    out << text;
    if (!out) throw logicloss::IoError("short write: " + path);
}

json compiled_json(const std::string& name, const logicloss::fol::Formula& f,
                   const logicloss::compiler::CompiledLoss& loss) {
    return json{{"name", name},
                {"formula", logicloss::fol::render(f)},
                {"prefix", logicloss::ad::to_prefix_string(loss.root)},
                {"inputs", loss.inputs()}};
}

void emit(const std::string& out_path, const json& j) {
    if (out_path.empty())
        std::cout << j.dump(2) << '\n';
    else
        write_text(out_path, j.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "logicloss: compiles entailment rules into differentiable losses and "
        "runs the consistency-training pipeline"};
    app.require_subcommand(1);

    // shared flag storage
    std::string kb_path, formula_text, bindings_path, out_path;
    std::string semantics_name = "product";
    double lambda = 0.0;
    int domain = 2;
    std::uint64_t seed = 42;

    const auto add_semantics = [&](CLI::App* sub) {
        sub->add_option("--semantics", semantics_name,
                        "t-norm family: godel|lukasiewicz|product|ss|frank")
            ->envname("LOGICLOSS_SEMANTICS")
            ->capture_default_str();
        sub->add_option("--lambda", lambda,
                        "parameter of the ss and frank families")
            ->envname("LOGICLOSS_LAMBDA")
            ->capture_default_str();
    };

    // ---- compile ----
    auto* cmd_compile = app.add_subcommand(
        "compile", "compile rule-base rules (or one formula) to loss graphs");
    cmd_compile->add_option("--kb", kb_path, "rule base directory or rules file")
        ->envname("LOGICLOSS_KB");
    cmd_compile->add_option("--formula", formula_text,
                            "single formula instead of the rule base");
    cmd_compile->add_option("--domain", domain,
                            "quantifier domain size (samples per binding)")
        ->capture_default_str();
    cmd_compile->add_option("--out", out_path, "write JSON here instead of stdout");
    add_semantics(cmd_compile);

    // ---- eval ----
    auto* cmd_eval =
        app.add_subcommand("eval", "evaluate one compiled loss on a binding file");
    cmd_eval->add_option("--formula", formula_text, "formula to compile")
        ->required();
    cmd_eval->add_option("--bindings", bindings_path,
                         "JSON object: input name -> value")
        ->required();
    cmd_eval->add_option("--domain", domain, "quantifier domain size")
        ->capture_default_str();
    cmd_eval->add_option("--out", out_path, "write JSON here instead of stdout");
    add_semantics(cmd_eval);

    // ---- grad-check ----
    double gc_h = 1e-5, gc_tol = 1e-4;
    auto* cmd_grad = app.add_subcommand(
        "grad-check", "compare reverse-mode gradients against central differences");
    cmd_grad->add_option("--formula", formula_text, "formula to compile")
        ->required();
    cmd_grad->add_option("--bindings", bindings_path,
                         "JSON object: input name -> value")
        ->required();
    cmd_grad->add_option("--domain", domain, "quantifier domain size")
        ->capture_default_str();
    cmd_grad->add_option("--h", gc_h, "probe step")->capture_default_str();
    cmd_grad->add_option("--tol", gc_tol, "max relative error")
        ->capture_default_str();
    cmd_grad->add_option("--out", out_path, "write JSON here instead of stdout");
    add_semantics(cmd_grad);

    // ---- gen-data ----
    int images = 100;
    double noise = logicloss::train::kDefaultNoise;
    int train_images = -1;
    std::string train_out, test_out;
    auto* cmd_gen = app.add_subcommand(
        "gen-data", "generate a synthetic linked-question dataset");
    cmd_gen->add_option("--images", images, "number of images")
        ->capture_default_str();
    cmd_gen->add_option("--noise", noise, "image feature noise scale")
        ->envname("LOGICLOSS_NOISE")
        ->capture_default_str();
    cmd_gen->add_option("--seed", seed, "generator seed")
        ->envname("LOGICLOSS_SEED")
        ->capture_default_str();
    cmd_gen->add_option("--kb", kb_path, "rule base directory")
        ->envname("LOGICLOSS_KB");
    cmd_gen->add_option("--out", out_path, "record file (JSON lines)");
    cmd_gen->add_option("--train-images", train_images,
                        "split: images in the training half");
    cmd_gen->add_option("--train-out", train_out, "split: training record file");
    cmd_gen->add_option("--test-out", test_out, "split: test record file");

    // ---- batch ----
    std::string input_path;
    std::size_t batch_size = 16;
    auto* cmd_batch = app.add_subcommand(
        "batch", "write hybrid batches as JSON-line id lists");
    cmd_batch->add_option("--input", input_path, "record file")->required();
    cmd_batch->add_option("--batch-size", batch_size, "members per batch")
        ->capture_default_str();
    cmd_batch->add_option("--seed", seed, "sampling seed")
        ->envname("LOGICLOSS_SEED")
        ->capture_default_str();
    cmd_batch->add_option("--out", out_path, "batch file (JSON lines)")
        ->required();

    // ---- train ----
    logicloss::train::TrainConfig cfg;
    std::string mode_name = "logic";
    std::string curves_path, model_path;
    auto* cmd_train =
        app.add_subcommand("train", "train the toy classifier on a record file");
    cmd_train->add_option("--input", input_path, "record file with features")
        ->required();
    cmd_train->add_option("--mode", mode_name, "original|hybrid|logic")
        ->envname("LOGICLOSS_MODE")
        ->capture_default_str();
    cmd_train->add_option("--beta", cfg.beta, "weight of the pair loss")
        ->envname("LOGICLOSS_BETA")
        ->capture_default_str();
    cmd_train->add_option("--epochs", cfg.epochs, "training epochs")
        ->envname("LOGICLOSS_EPOCHS")
        ->capture_default_str();
    cmd_train->add_option("--lr", cfg.learning_rate, "SGD learning rate")
        ->capture_default_str();
    cmd_train->add_option("--batch-size", cfg.batch_size, "members per batch")
        ->capture_default_str();
    cmd_train->add_option("--hidden", cfg.hidden, "encoder width")
        ->capture_default_str();
    cmd_train->add_option("--seed", cfg.seed, "init and shuffle seed")
        ->envname("LOGICLOSS_SEED")
        ->capture_default_str();
    cmd_train->add_flag("--duo-task", cfg.duo_task,
                        "hybrid only: also supervise the task head");
    cmd_train->add_option("--kb", kb_path,
                          "rule base directory (required for logic mode)")
        ->envname("LOGICLOSS_KB");
    cmd_train->add_option("--curves", curves_path, "write per-epoch CSV here");
    cmd_train->add_option("--model", model_path, "write the checkpoint here");
    add_semantics(cmd_train);

    // ---- predict ----
    auto* cmd_predict = app.add_subcommand(
        "predict", "argmax predictions from a checkpoint over a record file");
    cmd_predict->add_option("--model", model_path, "checkpoint file")->required();
    cmd_predict->add_option("--input", input_path, "record file with features")
        ->required();
    cmd_predict->add_option("--out", out_path, "prediction file (JSON lines)")
        ->required();

    // ---- evaluate ----
    std::string pred_path, gold_path;
    bool as_json = false;
    auto* cmd_evaluate = app.add_subcommand(
        "evaluate", "score predictions against gold records");
    cmd_evaluate->add_option("--pred", pred_path, "prediction file")->required();
    cmd_evaluate->add_option("--gold", gold_path, "gold record file")->required();
    cmd_evaluate->add_option("--kb", kb_path, "rule base directory")
        ->envname("LOGICLOSS_KB")
        ->required();
    cmd_evaluate->add_flag("--json", as_json, "print JSON instead of the table");
    cmd_evaluate->add_option("--out", out_path,
                             "write the report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const auto sem = [&] { return semantics_from(semantics_name, lambda); };

        if (app.got_subcommand(cmd_compile)) {
            json losses = json::array();
            if (!formula_text.empty()) {
                const auto f = parse_formula_arg(formula_text);
                losses.push_back(compiled_json(
                    "formula", f, logicloss::compiler::compile(f, sem(), domain)));
            } else {
                if (kb_path.empty())
                    throw logicloss::ValidationError(
                        "compile needs --kb or --formula");
                const auto base =
                    logicloss::kb::EntailmentKB::load(kb_dir_from(kb_path));
                for (const auto& rule : base.rules())
                    losses.push_back(compiled_json(
                        rule.name, rule.formula,
                        logicloss::compiler::compile(rule.formula, sem(), domain)));
            }
            emit(out_path, json{{"semantics", semantics_json(sem())},
                                {"domain", domain},
                                {"losses", losses}});
        } else if (app.got_subcommand(cmd_eval)) {
            const auto f = parse_formula_arg(formula_text);
            const auto loss = logicloss::compiler::compile(f, sem(), domain);
            const double v = loss.value(read_bindings(bindings_path));
            emit(out_path, json{{"semantics", semantics_json(sem())},
                                {"formula", logicloss::fol::render(f)},
                                {"loss", v}});
        } else if (app.got_subcommand(cmd_grad)) {
            const auto f = parse_formula_arg(formula_text);
            const auto loss = logicloss::compiler::compile(f, sem(), domain);
            const auto report = logicloss::ad::finite_diff_check(
                loss.root, read_bindings(bindings_path), gc_h, gc_tol);
            json entries = json::array();
            for (const auto& e : report.entries)
                entries.push_back(json{{"input", e.input},
                                       {"analytic", e.analytic},
                                       {"numeric", e.numeric},
                                       {"relErr", e.rel_err}});
            emit(out_path, json{{"pass", report.pass},
                                {"maxRelErr", report.max_rel_err},
                                {"nearKink", report.near_kink},
                                {"h", report.h},
                                {"tol", report.tol},
                                {"entries", entries}});
            if (!report.pass) return 1;
        } else if (app.got_subcommand(cmd_gen)) {
            const auto base = logicloss::kb::EntailmentKB::load(
                kb_path.empty() ? std::string(LOGICLOSS_DEFAULT_KB)
                                : kb_dir_from(kb_path));
            const auto records = logicloss::train::generate_synthetic(
                base, images, seed, noise);
            const bool split = train_images >= 0 || !train_out.empty() ||
                               !test_out.empty();
            if (split) {
                if (train_images < 0 || train_out.empty() || test_out.empty())
                    throw logicloss::ValidationError(
                        "--train-images, --train-out, and --test-out go together");
                const auto [head, tail] =
                    logicloss::train::split_by_image(records, train_images);
                logicloss::data::write_records(train_out, head);
                logicloss::data::write_records(test_out, tail);
                std::cerr << "wrote " << head.size() << " train and "
                          << tail.size() << " test records\n";
            } else {
                if (out_path.empty())
                    throw logicloss::ValidationError("gen-data needs --out");
                logicloss::data::write_records(out_path, records);
                std::cerr << "wrote " << records.size() << " records\n";
            }
        } else if (app.got_subcommand(cmd_batch)) {
            const auto records = logicloss::data::read_records(input_path);
            const auto families = logicloss::data::group_families(records);
            const auto batches = logicloss::data::build_hybrid_batches(
                families, records, batch_size, seed);
            std::string text;
            for (const auto& b : batches) {
                json ids = json::array();
                for (std::size_t m : b.members) ids.push_back(records[m].id);
                text += ids.dump();
                text += '\n';
            }
            write_text(out_path, text);
            std::cerr << "wrote " << batches.size() << " batches\n";
        } else if (app.got_subcommand(cmd_train)) {
            cfg.mode = logicloss::train::parse_mode(mode_name);
            cfg.semantics = sem();
            const auto records = logicloss::data::read_records(input_path);
            const logicloss::kb::EntailmentKB* base = nullptr;
            logicloss::kb::EntailmentKB loaded;
            if (!kb_path.empty()) {
                loaded = logicloss::kb::EntailmentKB::load(kb_dir_from(kb_path));
                base = &loaded;
            }
            const auto result = logicloss::train::train(cfg, records, base);
            if (!curves_path.empty())
                logicloss::train::write_curves(curves_path, result.curves);
            if (!model_path.empty())
                logicloss::train::save_model(model_path, result.params,
                                             result.answer_vocab);
            const auto& last = result.curves.back();
            std::cout << json{{"mode", mode_name},
                              {"epochs", cfg.epochs},
                              {"records", records.size()},
                              {"answerLoss", last.answer_loss},
                              {"answerAcc", last.answer_acc},
                              {"taskLoss", last.task_loss},
                              {"logicLoss", last.logic_loss}}
                             .dump()
                      << '\n';
        } else if (app.got_subcommand(cmd_predict)) {
            const auto loaded = logicloss::train::load_model(model_path);
            const auto records = logicloss::data::read_records(input_path);
            const auto preds = logicloss::train::predict(
                loaded.params, loaded.answer_vocab, records);
            logicloss::data::write_predictions(out_path, preds);
            std::cerr << "wrote " << preds.size() << " predictions\n";
        } else if (app.got_subcommand(cmd_evaluate)) {
            const auto base =
                logicloss::kb::EntailmentKB::load(kb_dir_from(kb_path));
            const auto gold = logicloss::data::read_records(gold_path);
            const auto preds = logicloss::data::read_predictions(pred_path);
            const auto rep = logicloss::metrics::evaluate(preds, gold, base);
            if (as_json) {
                emit(out_path, logicloss::metrics::report_json(rep));
            } else if (out_path.empty()) {
                std::cout << logicloss::metrics::report_table(rep);
            } else {
                write_text(out_path, logicloss::metrics::report_table(rep));
            }
        }
        return 0;
    } catch (const logicloss::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
