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

// Question records and their JSON-lines form. One record per line with keys
// `id, imageId, argument, semantic, answer, entailed, features`; `features`
// may be absent or null at ingest and is required before training.

#include <fstream>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "logicloss/compiler/compile.hpp"
#include "logicloss/errors.hpp"

namespace logicloss::data {

struct QuestionRecord {
    std::string id;
    std::string image_id;
    std::string argument;  // subject/object key the question is about
    std::string task;
    std::string gold_answer;
    std::vector<std::string> entailed_ids;
    std::vector<double> features;  // empty until featurized
};

inline nlohmann::json to_json(const QuestionRecord& r) {
    nlohmann::json j;
    j["id"] = r.id;
    j["imageId"] = r.image_id;
    j["argument"] = r.argument;
    j["semantic"] = r.task;
    j["answer"] = r.gold_answer;
    j["entailed"] = r.entailed_ids;
    j["features"] = r.features;
    return j;
}

inline QuestionRecord record_from_json(const nlohmann::json& j) {
    try {
        QuestionRecord r;
        r.id = j.at("id").get<std::string>();
        r.image_id = j.at("imageId").get<std::string>();
        r.argument = j.at("argument").get<std::string>();
        r.task = j.at("semantic").get<std::string>();
        r.gold_answer = j.at("answer").get<std::string>();
        r.entailed_ids = j.at("entailed").get<std::vector<std::string>>();
        if (j.contains("features") && !j.at("features").is_null())
            r.features = j.at("features").get<std::vector<double>>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataFileCorrupt(std::string("bad question record: ") + e.what());
    }
}

/// Reads a JSON-lines record file. Blank lines are ignored.
inline std::vector<QuestionRecord> read_records(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open record file: " + path);
    std::vector<QuestionRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataFileCorrupt(path + ":" + std::to_string(lineno) + ": " +
                                  e.what());
        }
        out.push_back(record_from_json(j));
    }
    return out;
}

inline void write_records(const std::string& path,
                          std::span<const QuestionRecord> records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open record file for writing: " + path);
    for (const QuestionRecord& r : records) out << to_json(r).dump() << '\n';
    if (!out) throw IoError("short write to record file: " + path);
}

/// Checks dataset-level invariants: unique ids, tasks in the vocabulary,
/// entailed ids resolving within the dataset. Throws ValidationError naming
/// every offending record id.
inline void validate_records(std::span<const QuestionRecord> records,
                             const compiler::TaskVocab& vocab) {
    std::unordered_set<std::string> ids;
    ids.reserve(records.size());
    std::string bad;
    const auto flag = [&](const std::string& id, const char* why) {
        if (!bad.empty()) bad += ", ";
        bad += id;
        bad += " (";
        bad += why;
        bad += ")";
    };
    for (const QuestionRecord& r : records) {
        if (!ids.insert(r.id).second) flag(r.id, "duplicate id");
        if (!vocab.contains(r.task)) flag(r.id, "unknown task");
    }
    for (const QuestionRecord& r : records)
        for (const std::string& e : r.entailed_ids)
            if (!ids.count(e)) flag(r.id, "dangling entailed id");
    if (!bad.empty()) throw ValidationError("invalid records: " + bad);
}

/// Index from record id to position; ids must already be unique.
inline std::unordered_map<std::string, std::size_t> index_by_id(
    std::span<const QuestionRecord> records) {
    std::unordered_map<std::string, std::size_t> out;
    out.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) out.emplace(records[i].id, i);
    return out;
}

}  // namespace logicloss::data
