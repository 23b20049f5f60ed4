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
#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>
#include <vector>

#include "logicloss/data/predictions.hpp"
#include "logicloss/data/record.hpp"
#include "logicloss/kb/entailment.hpp"
#include "logicloss/metrics/metrics.hpp"

using Catch::Approx;
using logicloss::DanglingEntailedId;
using logicloss::EmptyInput;
using logicloss::MissingPrediction;
using logicloss::ValidationError;
using logicloss::data::Prediction;
using logicloss::data::QuestionRecord;
using logicloss::kb::EntailmentKB;

namespace metrics = logicloss::metrics;

namespace {

const EntailmentKB& base() {
    static const EntailmentKB kb = EntailmentKB::load(LOGICLOSS_KB_DIR);
    return kb;
}

QuestionRecord rec(std::string id, std::string task, std::string answer,
                   std::vector<std::string> entailed = {}) {
    QuestionRecord r;
    r.id = std::move(id);
    r.image_id = "img0";
    r.argument = "arg";
    r.task = std::move(task);
    r.gold_answer = std::move(answer);
    r.entailed_ids = std::move(entailed);
    return r;
}

std::vector<Prediction> echo_gold(const std::vector<QuestionRecord>& records) {
    std::vector<Prediction> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back({r.id, r.gold_answer, r.task});
    return out;
}

// One linked family plus an isolated record; q1 <-> q2 entail each other.
std::vector<QuestionRecord> family_fixture() {
    return {
        rec("q1", "verifyGlobalTrue", "yes", {"q2", "q3"}),
        rec("q2", "queryGlobal", "beach", {"q1"}),
        rec("q3", "chooseGlobal", "beach"),
        rec("q4", "verifyAttrFalse", "no"),
    };
}

}  // namespace

TEST_CASE("perfect predictions score perfectly", "[metrics]") {
    const auto records = family_fixture();
    const auto preds = echo_gold(records);
    const auto rep = metrics::evaluate(preds, records, base());
    REQUIRE(rep.accuracy == 1.0);
    REQUIRE(rep.binary_accuracy == 1.0);
    REQUIRE(rep.open_accuracy == 1.0);
    REQUIRE(rep.consistency == 1.0);
    REQUIRE_FALSE(rep.consistency_degenerate);
    REQUIRE(rep.consistency_sources == 2);  // q1 and q2 carry links
    REQUIRE(rep.distribution == Approx(0.0).margin(1e-15));
    REQUIRE(rep.total == 4);
    REQUIRE(rep.binary_count == 2);
    REQUIRE(rep.open_count == 2);
}

TEST_CASE("consistency averages the fraction of correct partners", "[metrics]") {
    // Source s entails four partners; exactly three are answered correctly.
    std::vector<QuestionRecord> records = {
        rec("s", "verifyGlobalTrue", "yes", {"a", "b", "c", "d"}),
        rec("a", "queryGlobal", "beach"),
        rec("b", "queryGlobal", "street"),
        rec("c", "chooseGlobal", "beach"),
        rec("d", "chooseGlobal", "street"),
    };
    auto preds = echo_gold(records);
    preds[4].answer = "beach";  // d wrong
    bool degenerate = true;
    long sources = -1;
    const double c = metrics::consistency(preds, records, &degenerate, &sources);
    REQUIRE(c == Approx(0.75).margin(1e-15));
    REQUIRE_FALSE(degenerate);
    REQUIRE(sources == 1);
}

TEST_CASE("wrong sources leave the consistency denominator", "[metrics]") {
    auto records = family_fixture();
    auto preds = echo_gold(records);
    preds[0].answer = "no";    // q1 wrong: drops out as a source
    preds[1].answer = "road";  // q2 wrong, so no correct linked source remains
    bool degenerate = false;
    long sources = -1;
    const double c = metrics::consistency(preds, records, &degenerate, &sources);
    REQUIRE(c == 0.0);
    REQUIRE(degenerate);
    REQUIRE(sources == 0);
}

TEST_CASE("consistency validates links even on wrong sources", "[metrics]") {
    std::vector<QuestionRecord> records = {
        rec("s", "verifyGlobalTrue", "yes", {"ghost"}),
        rec("t", "queryGlobal", "beach"),
    };
    auto preds = echo_gold(records);
    preds[0].answer = "no";  // wrong source still has its links checked
    REQUIRE_THROWS_AS(metrics::consistency(preds, records), DanglingEntailedId);
}

TEST_CASE("distribution distance on a shifted binary histogram", "[metrics]") {
    // Gold yes/no 2:2, predicted 3:1.  Chi-square against the gold masses:
    // (0.75-0.5)^2/0.5 + (0.25-0.5)^2/0.5 = 0.25.
    std::vector<QuestionRecord> records = {
        rec("q1", "verifyGlobalTrue", "yes"),
        rec("q2", "verifyGlobalTrue", "yes"),
        rec("q3", "verifyGlobalFalse", "no"),
        rec("q4", "verifyGlobalFalse", "no"),
    };
    auto preds = echo_gold(records);
    preds[2].answer = "yes";
    REQUIRE(metrics::distribution_distance(preds, records) ==
            Approx(0.25).margin(1e-12));
}

TEST_CASE("distribution distance penalizes unsupported answers", "[metrics]") {
    // Gold all yes; one predicted answer outside the gold support.
    // (0.75-1)^2/1 + 0.25^2/(1/8) = 0.0625 + 0.5 = 0.5625.
    std::vector<QuestionRecord> records = {
        rec("q1", "verifyGlobalTrue", "yes"),
        rec("q2", "verifyGlobalTrue", "yes"),
        rec("q3", "verifyGlobalTrue", "yes"),
        rec("q4", "verifyGlobalTrue", "yes"),
    };
    auto preds = echo_gold(records);
    preds[3].answer = "blue";
    REQUIRE(metrics::distribution_distance(preds, records) ==
            Approx(0.5625).margin(1e-12));
}

TEST_CASE("metrics match a naive recompute on random errors", "[metrics]") {
    struct Shape {
        const char* task;
        const char* answer;
    };
    const Shape shapes[] = {
        {"verifyGlobalTrue", "yes"}, {"verifyGlobalFalse", "no"},
        {"queryGlobal", "beach"},    {"chooseGlobal", "street"},
        {"existRelTrue", "yes"},     {"verifyRelFalse", "no"},
        {"queryRel", "holding"},
    };
    for (unsigned seed : {1u, 2u, 3u, 4u, 5u}) {
        std::mt19937 rng(seed);
        std::uniform_int_distribution<int> members(2, 5);
        std::uniform_int_distribution<int> pick(0, 6);
        std::bernoulli_distribution link(0.6);
        std::bernoulli_distribution flip(0.3);

        std::vector<QuestionRecord> records;
        for (int f = 0; f < 8; ++f) {
            const int m = members(rng);
            const int first = static_cast<int>(records.size());
            for (int i = 0; i < m; ++i) {
                const auto& s = shapes[pick(rng)];
                records.push_back(
                    rec("f" + std::to_string(f) + "q" + std::to_string(i),
                        s.task, s.answer));
            }
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    if (i != j && link(rng))
                        records[first + i].entailed_ids.push_back(
                            records[first + j].id);
        }
        auto preds = echo_gold(records);
        for (auto& p : preds)
            if (flip(rng)) p.answer += "_x";

        const auto rep = metrics::evaluate(preds, records, base());

        // Naive pass over the same data.
        long correct = 0, bin = 0, bin_ok = 0;
        std::vector<char> ok(records.size());
        for (std::size_t i = 0; i < records.size(); ++i) {
            ok[i] = preds[i].answer == records[i].gold_answer;
            correct += ok[i];
            const bool binary = records[i].gold_answer == "yes" ||
                                records[i].gold_answer == "no";
            bin += binary;
            bin_ok += binary && ok[i];
        }
        const auto by_id = logicloss::data::index_by_id(records);
        double sum = 0.0;
        long n = 0;
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (!ok[i] || records[i].entailed_ids.empty()) continue;
            long hit = 0;
            for (const auto& id : records[i].entailed_ids)
                hit += ok[by_id.at(id)];
            sum += static_cast<double>(hit) / records[i].entailed_ids.size();
            ++n;
        }
        REQUIRE(rep.accuracy ==
                Approx(static_cast<double>(correct) / records.size())
                    .margin(1e-12));
        REQUIRE(rep.binary_count == bin);
        REQUIRE(rep.binary_accuracy ==
                Approx(bin == 0 ? 0.0 : static_cast<double>(bin_ok) / bin)
                    .margin(1e-12));
        REQUIRE(rep.consistency_sources == n);
        if (n > 0)
            REQUIRE(rep.consistency == Approx(sum / n).margin(1e-12));
    }
}

TEST_CASE("per-label splits count every record once", "[metrics]") {
    auto records = family_fixture();
    auto preds = echo_gold(records);
    preds[2].answer = "street";  // one choose/global miss
    const auto rep = metrics::evaluate(preds, records, base());

    REQUIRE(rep.per_category.size() == 3);
    REQUIRE(rep.per_category.at("verify").count == 2);
    REQUIRE(rep.per_category.at("verify").correct == 2);
    REQUIRE(rep.per_category.at("query").count == 1);
    REQUIRE(rep.per_category.at("choose").correct == 0);
    REQUIRE(rep.per_structural.size() == 2);
    REQUIRE(rep.per_structural.at("global").count == 3);
    REQUIRE(rep.per_structural.at("global").correct == 2);
    REQUIRE(rep.per_structural.at("attr").count == 1);

    long total_cat = 0;
    for (const auto& [name, score] : rep.per_category) total_cat += score.count;
    REQUIRE(total_cat == rep.total);
}

TEST_CASE("metric input errors are loud", "[metrics]") {
    const auto records = family_fixture();

    SECTION("missing prediction") {
        auto preds = echo_gold(records);
        preds.pop_back();
        REQUIRE_THROWS_AS(metrics::evaluate(preds, records, base()),
                          MissingPrediction);
    }
    SECTION("extra predictions are ignored") {
        auto preds = echo_gold(records);
        preds.push_back({"stray", "yes", "verifyGlobalTrue"});
        REQUIRE(metrics::evaluate(preds, records, base()).accuracy == 1.0);
    }
    SECTION("dangling entailed id") {
        auto records2 = records;
        records2[0].entailed_ids.push_back("nowhere");
        REQUIRE_THROWS_AS(metrics::consistency(echo_gold(records2), records2),
                          DanglingEntailedId);
    }
    SECTION("unknown task name") {
        auto records2 = records;
        records2[1].task = "interrogateGlobal";
        REQUIRE_THROWS_AS(
            metrics::accuracy_report(echo_gold(records2), records2, base()),
            ValidationError);
    }
    SECTION("empty input") {
        const std::vector<QuestionRecord> none;
        const std::vector<Prediction> nopreds;
        REQUIRE_THROWS_AS(metrics::distribution_distance(nopreds, none),
                          EmptyInput);
    }
}

TEST_CASE("text report lists every metric row", "[metrics]") {
    const auto records = family_fixture();
    const auto rep = metrics::evaluate(echo_gold(records), records, base());
    const std::string table = metrics::report_table(rep);

    for (const char* row : {"Binary", "Open", "Accuracy", "Consistency",
                            "Validity", "Plausibility", "Distribution",
                            "verify", "query", "choose", "global", "attr"})
        REQUIRE(table.find(row) != std::string::npos);
    REQUIRE(table.find("100.00%") != std::string::npos);
    REQUIRE(table.find("n/a") != std::string::npos);
    REQUIRE(table.find("0.0000") != std::string::npos);
    REQUIRE(table.find("degenerate") == std::string::npos);

    metrics::MetricsReport empty_rep{};
    empty_rep.consistency_degenerate = true;
    REQUIRE(metrics::report_table(empty_rep).find("(degenerate)") !=
            std::string::npos);
}

TEST_CASE("json report mirrors the table", "[metrics]") {
    const auto records = family_fixture();
    auto preds = echo_gold(records);
    preds[3].answer = "yes";  // one binary miss
    const auto rep = metrics::evaluate(preds, records, base());
    const nlohmann::json j = metrics::report_json(rep);

    REQUIRE(j.at("accuracy").get<double>() == Approx(0.75));
    REQUIRE(j.at("binary").get<double>() == Approx(0.5));
    REQUIRE(j.at("open").get<double>() == Approx(1.0));
    REQUIRE(j.at("validity").is_null());
    REQUIRE(j.at("plausibility").is_null());
    REQUIRE(j.at("counts").at("total").get<long>() == 4);
    REQUIRE(j.at("perCategory").at("verify").at("count").get<long>() == 2);
    REQUIRE(j.at("perCategory").at("verify").at("correct").get<long>() == 1);
    REQUIRE(j.at("perStructural").at("attr").at("accuracy").get<double>() ==
            Approx(0.0));
    REQUIRE(j.at("consistencyDegenerate").get<bool>() == false);
    REQUIRE(j.at("consistencySources").get<long>() == 2);
}
