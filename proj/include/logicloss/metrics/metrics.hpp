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

// Prediction scoring: exact-match accuracy (overall, binary yes/no, open),
// accuracy per task category and per structural label, entailment
// consistency, and the chi-square distance between answer histograms.

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "logicloss/data/predictions.hpp"
#include "logicloss/data/record.hpp"
#include "logicloss/errors.hpp"
#include "logicloss/kb/entailment.hpp"

namespace logicloss::metrics {

// Accuracy restricted to one slice of the dataset.
struct SplitScore {
    long count = 0;
    long correct = 0;

    double accuracy() const {
        return count == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(count);
    }
};

struct MetricsReport {
    double accuracy = 0.0;
    double binary_accuracy = 0.0;  // questions whose gold answer is yes/no
    double open_accuracy = 0.0;    // all remaining questions
    double consistency = 0.0;
    double distribution = 0.0;

    long total = 0;
    long binary_count = 0;
    long open_count = 0;
    // Denominator of the consistency mean: correctly answered questions
    // that carry at least one entailed link.
    long consistency_sources = 0;
    // True when consistency_sources == 0, so consistency defaulted to 0.
    bool consistency_degenerate = false;

    std::map<std::string, SplitScore> per_category;    // verify, query, ...
    std::map<std::string, SplitScore> per_structural;  // global, attr, ...
};

namespace detail {

// Maps every gold record to its prediction; a gold id without one is an error.
inline std::vector<const data::Prediction*> align(
    std::span<const data::Prediction> predictions,
    std::span<const data::QuestionRecord> records) {
    std::unordered_map<std::string_view, const data::Prediction*> by_id;
    by_id.reserve(predictions.size());
    for (const auto& p : predictions) by_id.emplace(p.id, &p);
    std::vector<const data::Prediction*> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        auto it = by_id.find(r.id);
        if (it == by_id.end()) throw MissingPrediction(r.id);
        out.push_back(it->second);
    }
    return out;
}

inline bool is_binary(const data::QuestionRecord& r) {
    return r.gold_answer == "yes" || r.gold_answer == "no";
}

}  // namespace detail

// Exact-match accuracy overall, per binary/open split, and per KB label.
// Leaves consistency and distribution at their defaults.
inline MetricsReport accuracy_report(std::span<const data::Prediction> predictions,
                                     std::span<const data::QuestionRecord> records,
                                     const kb::EntailmentKB& base) {
    const auto pred = detail::align(predictions, records);
    MetricsReport rep;
    rep.total = static_cast<long>(records.size());
    long correct_total = 0;
    long correct_binary = 0;
    long correct_open = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        const auto& t = base.task(r.task);  // unknown names throw ValidationError
        const bool ok = pred[i]->answer == r.gold_answer;
        correct_total += ok;
        if (detail::is_binary(r)) {
            ++rep.binary_count;
            correct_binary += ok;
        } else {
            ++rep.open_count;
            correct_open += ok;
        }
        auto& cat = rep.per_category[t.category];
        ++cat.count;
        cat.correct += ok;
        auto& str = rep.per_structural[t.structural];
        ++str.count;
        str.correct += ok;
    }
    rep.accuracy = rep.total == 0 ? 0.0 : static_cast<double>(correct_total) / rep.total;
    rep.binary_accuracy =
        rep.binary_count == 0 ? 0.0 : static_cast<double>(correct_binary) / rep.binary_count;
    rep.open_accuracy =
        rep.open_count == 0 ? 0.0 : static_cast<double>(correct_open) / rep.open_count;
    return rep;
}

// Mean, over correctly answered questions with >= 1 entailed link, of the
// fraction of their entailed questions also answered correctly.  Questions
// without links never enter the denominator.  With an empty denominator the
// metric is 0 and *degenerate is set.
inline double consistency(std::span<const data::Prediction> predictions,
                          std::span<const data::QuestionRecord> records,
                          bool* degenerate = nullptr,
                          long* sources = nullptr) {
    const auto pred = detail::align(predictions, records);
    const auto by_id = data::index_by_id(records);
    std::vector<char> ok(records.size());
    for (std::size_t i = 0; i < records.size(); ++i)
        ok[i] = pred[i]->answer == records[i].gold_answer;
    double sum = 0.0;
    long n = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& links = records[i].entailed_ids;
        if (links.empty()) continue;
        long hit = 0;
        for (const auto& id : links) {
            auto it = by_id.find(id);
            if (it == by_id.end()) throw DanglingEntailedId(id);
            hit += ok[it->second];
        }
        if (!ok[i]) continue;
        sum += static_cast<double>(hit) / static_cast<double>(links.size());
        ++n;
    }
    if (sources != nullptr) *sources = n;
    if (degenerate != nullptr) *degenerate = (n == 0);
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

// Chi-square distance between the normalized predicted and gold answer
// histograms: sum over gold-supported answers of (p_a - g_a)^2 / g_a, plus
// p_a^2 / eps for predicted answers outside the gold support, eps = 1/(2N).
inline double distribution_distance(std::span<const data::Prediction> predictions,
                                    std::span<const data::QuestionRecord> records) {
    if (records.empty()) throw EmptyInput("no records to score");
    const auto pred = detail::align(predictions, records);
    const double n = static_cast<double>(records.size());
    std::map<std::string, double> gold_mass;
    std::map<std::string, double> pred_mass;
    for (std::size_t i = 0; i < records.size(); ++i) {
        gold_mass[records[i].gold_answer] += 1.0 / n;
        pred_mass[pred[i]->answer] += 1.0 / n;
    }
    const double eps = 1.0 / (2.0 * n);
    double sum = 0.0;
    for (const auto& [answer, g] : gold_mass) {
        const auto it = pred_mass.find(answer);
        const double p = it == pred_mass.end() ? 0.0 : it->second;
        sum += (p - g) * (p - g) / g;
    }
    for (const auto& [answer, p] : pred_mass)
        if (!gold_mass.contains(answer)) sum += p * p / eps;
    return sum;
}

// Full report: accuracy splits plus consistency and distribution.
inline MetricsReport evaluate(std::span<const data::Prediction> predictions,
                              std::span<const data::QuestionRecord> records,
                              const kb::EntailmentKB& base) {
    MetricsReport rep = accuracy_report(predictions, records, base);
    rep.consistency = consistency(predictions, records, &rep.consistency_degenerate,
                                  &rep.consistency_sources);
    rep.distribution = distribution_distance(predictions, records);
    return rep;
}

namespace detail {

inline std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f%%", v * 100.0);
    return buf;
}

inline std::string plain(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

}  // namespace detail

// Aligned two-column text table.  Validity and plausibility need answer-scope
// resources this project does not ship, so they are fixed "n/a" rows.
inline std::string report_table(const MetricsReport& rep) {
    std::vector<std::pair<std::string, std::string>> rows;
    rows.emplace_back("Binary", detail::percent(rep.binary_accuracy));
    rows.emplace_back("Open", detail::percent(rep.open_accuracy));
    rows.emplace_back("Accuracy", detail::percent(rep.accuracy));
    rows.emplace_back("Consistency", detail::percent(rep.consistency) +
                                         (rep.consistency_degenerate ? " (degenerate)" : ""));
    rows.emplace_back("Validity", "n/a");
    rows.emplace_back("Plausibility", "n/a");
    rows.emplace_back("Distribution", detail::plain(rep.distribution));
    for (const auto& [name, score] : rep.per_category)
        rows.emplace_back(name, detail::percent(score.accuracy()));
    for (const auto& [name, score] : rep.per_structural)
        rows.emplace_back(name, detail::percent(score.accuracy()));
    std::size_t width = 0;
    for (const auto& [name, value] : rows) width = std::max(width, name.size());
    std::ostringstream out;
    for (const auto& [name, value] : rows)
        out << name << std::string(width - name.size() + 2, ' ') << value << '\n';
    return out.str();
}

inline nlohmann::json report_json(const MetricsReport& rep) {
    nlohmann::json per_category = nlohmann::json::object();
    for (const auto& [name, score] : rep.per_category)
        per_category[name] = {{"accuracy", score.accuracy()},
                              {"count", score.count},
                              {"correct", score.correct}};
    nlohmann::json per_structural = nlohmann::json::object();
    for (const auto& [name, score] : rep.per_structural)
        per_structural[name] = {{"accuracy", score.accuracy()},
                                {"count", score.count},
                                {"correct", score.correct}};
    return nlohmann::json{{"binary", rep.binary_accuracy},
                          {"open", rep.open_accuracy},
                          {"accuracy", rep.accuracy},
                          {"consistency", rep.consistency},
                          {"consistencyDegenerate", rep.consistency_degenerate},
                          {"consistencySources", rep.consistency_sources},
                          {"validity", nullptr},
                          {"plausibility", nullptr},
                          {"distribution", rep.distribution},
                          {"counts",
                           {{"total", rep.total},
                            {"binary", rep.binary_count},
                            {"open", rep.open_count}}},
                          {"perCategory", per_category},
                          {"perStructural", per_structural}};
}

}  // namespace logicloss::metrics
