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

// Model predictions, one JSON object per line: {id, answer, task}.

#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "logicloss/errors.hpp"

namespace logicloss::data {

struct Prediction {
    std::string id;
    std::string answer;
    std::string task;
};

inline std::vector<Prediction> read_predictions(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open prediction file: " + path);
    std::vector<Prediction> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const nlohmann::json j = nlohmann::json::parse(line);
            out.push_back(Prediction{j.at("id").get<std::string>(),
                                     j.at("answer").get<std::string>(),
                                     j.at("task").get<std::string>()});
        } catch (const nlohmann::json::exception& e) {
            throw DataFileCorrupt(path + ":" + std::to_string(lineno) + ": " +
                                  e.what());
        }
    }
    return out;
}

inline void write_predictions(const std::string& path,
                              std::span<const Prediction> preds) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open prediction file for writing: " + path);
    for (const Prediction& p : preds) {
        nlohmann::json j;
        j["id"] = p.id;
        j["answer"] = p.answer;
        j["task"] = p.task;
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("short write to prediction file: " + path);
}

}  // namespace logicloss::data
