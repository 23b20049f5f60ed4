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

// ── Entailment knowledge base ───────────────────────────────────────────────
//
// Two pinned data files describe the semantic-task graph:
//
//   tasks.json             task names (sorted), label overrides, and the
//                          rule count + checksum the rule file must match
//   gqa_entailments.rules  one rule per line over those tasks; every rule
//                          has the shape
//                            forall x1 forall x2 : src(x1) {=>|<=>} dst(x2)
//
// load() cross-validates the pair and fails loudly (DataFileCorrupt) on any
// drift: wrong counts, out-of-vocabulary names, malformed shapes, duplicate
// edges, or a checksum mismatch over the canonical src|conn|dst lines.
//
// Each task carries two report labels. `category` is the question form
// (verify, query, choose, exist, compare, logical); `structural` is the
// question subject (global, rel, attr, obj, cat). Both derive from the task
// name, with exceptions listed in tasks.json.

#include <algorithm>
#include <charconv>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "logicloss/compiler/compile.hpp"
#include "logicloss/detail/rng.hpp"
#include "logicloss/errors.hpp"
#include "logicloss/fol/formula.hpp"
#include "logicloss/fol/parse.hpp"
#include "logicloss/kb/task_names.hpp"
#include "logicloss/tnorm/semantics.hpp"

namespace logicloss::kb {

struct SemanticTask {
    std::string name;
    std::string category;    // verify | query | choose | exist | compare | logical
    std::string structural;  // global | rel | attr | obj | cat
};

struct EntailmentRule {
    int id = 0;  // 1-based position in the rule file
    int src = -1;
    int dst = -1;
    fol::Connective conn = fol::Connective::ResidualImpl;
    std::string name;
    double weight = 1.0;
    fol::Formula formula;
};

/// Question-form label implied by a task name.
inline std::string derive_category(std::string_view name) {
    for (const char* prefix : {"verify", "query", "choose", "exist"})
        if (name.substr(0, std::string_view(prefix).size()) == prefix) return prefix;
    if (name.find("compare") != std::string_view::npos) return "compare";
    for (const char* prefix : {"twoSame", "twoDiff", "allSame", "allDiff"})
        if (name.substr(0, std::string_view(prefix).size()) == prefix)
            return "logical";
    return "other";
}

/// Question-subject label implied by a task name.
inline std::string derive_structural(std::string_view name) {
    if (name.find("Global") != std::string_view::npos) return "global";
    if (name.find("Rel") != std::string_view::npos) return "rel";
    if (name.find("Attr") != std::string_view::npos) return "attr";
    if (name.find("Obj") != std::string_view::npos) return "obj";
    return "cat";
}

class EntailmentKB {
public:
    static constexpr int kTaskCount = 51 - 3;  // 48 semantic tasks

    /// Loads and cross-validates tasks.json + gqa_entailments.rules in `dir`.
    static EntailmentKB load(const std::string& dir) {
        EntailmentKB kb;
        const nlohmann::json meta = read_json(dir + "/tasks.json");
        kb.init_tasks(meta);
        kb.init_rules(meta, read_text(dir + "/gqa_entailments.rules"));
        return kb;
    }

    const compiler::TaskVocab& vocab() const { return vocab_; }
    const std::vector<SemanticTask>& tasks() const { return tasks_; }
    const std::vector<EntailmentRule>& rules() const { return rules_; }

    const SemanticTask& task(int index) const {
        if (index < 0 || static_cast<std::size_t>(index) >= tasks_.size())
            throw ValidationError("task index out of range");
        return tasks_[static_cast<std::size_t>(index)];
    }
    const SemanticTask& task(std::string_view name) const {
        return tasks_[static_cast<std::size_t>(vocab_.index(name))];
    }

    /// Indices into rules() whose source is the given task.
    const std::vector<int>& rules_from(int src_index) const {
        if (src_index < 0 || static_cast<std::size_t>(src_index) >= from_.size())
            throw ValidationError("task index out of range");
        return from_[static_cast<std::size_t>(src_index)];
    }

    /// Truth degree of one rule against two task-probability vectors.
    double rule_truth(const EntailmentRule& r, std::span<const double> tp1,
                      std::span<const double> tp2,
                      const tnorm::Semantics& sem) const {
        if (tp1.size() != vocab_.size() || tp2.size() != vocab_.size())
            throw ShapeMismatch("task probability vector does not match the vocabulary");
        return tnorm::eval_connective(sem, r.conn,
                                      tp1[static_cast<std::size_t>(r.src)],
                                      tp2[static_cast<std::size_t>(r.dst)]);
    }

    struct BestRelation {
        double truth = 0.0;
        int rule_id = 0;  // 1-based; ties resolve to the lowest id
    };

    /// The best-satisfied rule over an ordered sample pair.
    BestRelation best_relation_truth(std::span<const double> tp1,
                                     std::span<const double> tp2,
                                     const tnorm::Semantics& sem) const {
        BestRelation best{-1.0, 0};
        for (const EntailmentRule& r : rules_) {
            const double t = rule_truth(r, tp1, tp2, sem);
            if (t > best.truth) best = {t, r.id};
        }
        return best;
    }

private:
    static std::string read_text(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        if (in.bad()) throw IoError("cannot read " + path);
        return std::move(ss).str();
    }

    static nlohmann::json read_json(const std::string& path) {
        const std::string text = read_text(path);
        try {
            return nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw DataFileCorrupt(path + ": " + e.what());
        }
    }

    void init_tasks(const nlohmann::json& meta) {
        try {
            if (meta.at("format").get<std::string>() != "logicloss-tasks-v1")
                throw DataFileCorrupt("tasks.json: unknown format tag");
            std::vector<std::string> names =
                meta.at("tasks").get<std::vector<std::string>>();
            if (static_cast<int>(names.size()) != kTaskCount)
                throw DataFileCorrupt("tasks.json: expected " +
                                      std::to_string(kTaskCount) + " tasks, found " +
                                      std::to_string(names.size()));
            if (!std::is_sorted(names.begin(), names.end()) ||
                std::adjacent_find(names.begin(), names.end()) != names.end())
                throw DataFileCorrupt("tasks.json: tasks must be sorted and unique");
            for (int i = 0; i < kTaskCount; ++i)
                if (names[static_cast<std::size_t>(i)] !=
                    kTaskNames[static_cast<std::size_t>(i)])
                    throw DataFileCorrupt(
                        "tasks.json: task list diverges from the fixed "
                        "vocabulary at " +
                        names[static_cast<std::size_t>(i)]);
            const auto cat_over = overrides(meta, "category_overrides");
            const auto str_over = overrides(meta, "structural_overrides");
            vocab_ = compiler::TaskVocab(names);
            for (const std::string& n : names) {
                SemanticTask t;
                t.name = n;
                t.category = pick(cat_over, n, derive_category(n));
                t.structural = pick(str_over, n, derive_structural(n));
                check_label(t.category,
                            {"verify", "query", "choose", "exist", "compare",
                             "logical", "other"},
                            "category");
                check_label(t.structural, {"global", "rel", "attr", "obj", "cat"},
                            "structural");
                tasks_.push_back(std::move(t));
            }
            for (const auto& [key, value] : cat_over) require_task(key);
            for (const auto& [key, value] : str_over) require_task(key);
        } catch (const nlohmann::json::exception& e) {
            throw DataFileCorrupt(std::string("tasks.json: ") + e.what());
        }
    }

    void init_rules(const nlohmann::json& meta, const std::string& text) {
        int expected = 0;
        std::string checksum;
        try {
            expected = meta.at("rule_count").get<int>();
            checksum = meta.at("rules_checksum_fnv1a64").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw DataFileCorrupt(std::string("tasks.json: ") + e.what());
        }

        auto parsed = fol::parse_kb(text, vocab_.names());
        if (!parsed.ok())
            throw DataFileCorrupt(
                "gqa_entailments.rules: " + parsed.error().message + " (offset " +
                std::to_string(parsed.error().offset) + ")");
        const fol::KnowledgeBase& raw = parsed.value();
        if (static_cast<int>(raw.rules.size()) != expected)
            throw DataFileCorrupt("gqa_entailments.rules: expected " +
                                  std::to_string(expected) + " rules, found " +
                                  std::to_string(raw.rules.size()));

        std::string canonical;
        std::vector<std::string> seen;
        from_.assign(vocab_.size(), {});
        for (std::size_t i = 0; i < raw.rules.size(); ++i) {
            EntailmentRule r = lower_rule(raw.rules[i], static_cast<int>(i) + 1);
            const std::string key = vocab_.name(r.src) + "|" +
                                    fol::connective_token(r.conn) + "|" +
                                    vocab_.name(r.dst);
            seen.push_back(key);
            canonical += key;
            canonical += '\n';
            from_[static_cast<std::size_t>(r.src)].push_back(static_cast<int>(i));
            rules_.push_back(std::move(r));
        }
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
            throw DataFileCorrupt("gqa_entailments.rules: duplicate rule edge");

        char hex[17] = {};
        std::to_chars(hex, hex + 16, detail::fnv1a64(canonical), 16);
        std::string computed(hex);
        computed.insert(0, 16 - computed.size(), '0');
        if (computed != checksum)
            throw DataFileCorrupt("gqa_entailments.rules: checksum " + computed +
                                  " does not match tasks.json (" + checksum + ")");
    }

    EntailmentRule lower_rule(const fol::Rule& rule, int id) const {
        const auto corrupt = [&](const char* why) -> DataFileCorrupt {
            return DataFileCorrupt("rule \"" + rule.name + "\": " + why);
        };
        const fol::Formula& outer = rule.formula;
        if (outer.kind() != fol::NodeKind::ForAll) throw corrupt("expected forall x1");
        const fol::Formula inner = outer.body();
        if (inner.kind() != fol::NodeKind::ForAll) throw corrupt("expected forall x2");
        const fol::Formula body = inner.body();
        if (body.kind() != fol::NodeKind::Binary ||
            (body.connective() != fol::Connective::ResidualImpl &&
             body.connective() != fol::Connective::BiResidual))
            throw corrupt("body must be src => dst or src <=> dst");
        const fol::Formula lhs = body.lhs();
        const fol::Formula rhs = body.rhs();
        if (lhs.kind() != fol::NodeKind::TaskAtom ||
            rhs.kind() != fol::NodeKind::TaskAtom)
            throw corrupt("both sides must be task atoms");
        if (lhs.variable() != outer.variable() || rhs.variable() != inner.variable())
            throw corrupt("atoms must use the binders in order");
        if (lhs.predicate() == rhs.predicate())
            throw corrupt("source and target task must differ");
        const std::string expect = lhs.predicate() +
                                   fol::connective_token(body.connective()) +
                                   rhs.predicate();
        if (rule.name != expect) throw corrupt("rule name must be src<conn>dst");
        return EntailmentRule{id,
                              vocab_.index(lhs.predicate()),
                              vocab_.index(rhs.predicate()),
                              body.connective(),
                              rule.name,
                              rule.weight,
                              rule.formula};
    }

    static std::vector<std::pair<std::string, std::string>> overrides(
        const nlohmann::json& meta, const char* key) {
        std::vector<std::pair<std::string, std::string>> out;
        if (!meta.contains(key)) return out;
        for (const auto& [k, v] : meta.at(key).items())
            out.emplace_back(k, v.get<std::string>());
        return out;
    }

    static std::string pick(
        const std::vector<std::pair<std::string, std::string>>& over,
        const std::string& name, std::string fallback) {
        for (const auto& [k, v] : over)
            if (k == name) return v;
        return fallback;
    }

    static void check_label(const std::string& value,
                            std::initializer_list<const char*> allowed,
                            const char* what) {
        for (const char* a : allowed)
            if (value == a) return;
        throw DataFileCorrupt("tasks.json: invalid " + std::string(what) +
                              " label '" + value + "'");
    }

    void require_task(const std::string& name) const {
        if (!vocab_.contains(name))
            throw DataFileCorrupt("tasks.json: override names unknown task '" +
                                  name + "'");
    }

    compiler::TaskVocab vocab_;
    std::vector<SemanticTask> tasks_;
    std::vector<EntailmentRule> rules_;
    std::vector<std::vector<int>> from_;
};

}  // namespace logicloss::kb
