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

// Families and hybrid batches.
//
// A family groups questions about the same (image, argument) pair with
// pairwise-distinct semantic tasks, at most six per family. A hybrid batch
// is one family followed by fillers drawn uniformly without replacement
// from the general pool; fillers never duplicate a family member within
// the same batch, but may recur across batches.
//
// Families and batches hold indices into the caller's record vector, never
// copies; the record vector must outlive them.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "logicloss/data/record.hpp"
#include "logicloss/detail/rng.hpp"
#include "logicloss/errors.hpp"

namespace logicloss::data {

inline constexpr std::size_t kMaxFamilySize = 6;

struct Family {
    std::string image_id;
    std::string argument;
    std::vector<std::size_t> members;  // indices into the source records
};

struct HybridBatch {
    std::size_t family_index = 0;   // position in the family list
    std::size_t family_size = 0;    // members[0 .. family_size) are the family
    std::vector<std::size_t> members;
};

/// Partitions records into families keyed by (image_id, argument), in first
/// appearance order. Within a group each record joins the first open family
/// that lacks its task and has room; otherwise a new family opens. Later
/// duplicates of a task are kept, in a fresh family, rather than dropped.
inline std::vector<Family> group_families(
    std::span<const QuestionRecord> records) {
    std::vector<Family> out;
    // group key -> indices into `out` of that group's families, in open order
    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> open;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const QuestionRecord& r = records[i];
        std::vector<std::size_t>& group = open[{r.image_id, r.argument}];
        std::size_t placed = out.size();
        for (std::size_t f : group) {
            Family& fam = out[f];
            if (fam.members.size() >= kMaxFamilySize) continue;
            const bool clash = std::any_of(
                fam.members.begin(), fam.members.end(),
                [&](std::size_t m) { return records[m].task == r.task; });
            if (!clash) {
                placed = f;
                break;
            }
        }
        if (placed == out.size()) {
            out.push_back(Family{r.image_id, r.argument, {}});
            group.push_back(placed);
        }
        out[placed].members.push_back(i);
    }
    return out;
}

/// Builds one batch per family, in family order, filling each to batch_size
/// with uniform draws (without replacement within the batch) from the whole
/// record pool. A single engine seeded from `seed` drives every draw, so
/// identical seeds reproduce identical batch sequences.
inline std::vector<HybridBatch> build_hybrid_batches(
    std::span<const Family> families, std::span<const QuestionRecord> pool,
    std::size_t batch_size = 16, std::uint64_t seed = 0) {
    if (batch_size < kMaxFamilySize)
        throw ValidationError("batch size must be at least " +
                              std::to_string(kMaxFamilySize));
    if (pool.empty()) throw ValidationError("record pool is empty");

    // family members live in the pool, so a batch needs batch_size distinct
    // pool entries in total
    if (pool.size() < batch_size && !families.empty())
        throw PoolTooSmall("pool of " + std::to_string(pool.size()) +
                           " records cannot fill a batch of " +
                           std::to_string(batch_size));

    std::mt19937_64 rng(seed);
    std::vector<HybridBatch> out;
    out.reserve(families.size());
    for (std::size_t f = 0; f < families.size(); ++f) {
        const Family& fam = families[f];
        HybridBatch b;
        b.family_index = f;
        b.family_size = fam.members.size();
        b.members = fam.members;
        b.members.reserve(batch_size);
        while (b.members.size() < batch_size) {
            const std::size_t cand =
                static_cast<std::size_t>(detail::uniform_index(rng, pool.size()));
            if (std::find(b.members.begin(), b.members.end(), cand) !=
                b.members.end())
                continue;  // already in this batch; redraw
            b.members.push_back(cand);
        }
        out.push_back(std::move(b));
    }
    return out;
}

struct BatchStats {
    std::size_t batches = 0;
    std::map<std::size_t, std::size_t> family_size_hist;
    std::size_t distinct_family_tasks = 0;  // task coverage over family slots
    std::size_t filler_slots = 0;
    std::size_t distinct_filler_records = 0;
    double filler_overlap_rate = 0.0;  // 1 - distinct/slots; 0 without fillers
};

inline BatchStats batch_stats(std::span<const HybridBatch> batches,
                              std::span<const QuestionRecord> records) {
    BatchStats s;
    s.batches = batches.size();
    std::unordered_set<std::string> tasks;
    std::unordered_set<std::size_t> fillers;
    for (const HybridBatch& b : batches) {
        s.family_size_hist[b.family_size] += 1;
        for (std::size_t i = 0; i < b.members.size(); ++i) {
            if (i < b.family_size)
                tasks.insert(records[b.members[i]].task);
            else
                fillers.insert(b.members[i]);
        }
        s.filler_slots += b.members.size() - b.family_size;
    }
    s.distinct_family_tasks = tasks.size();
    s.distinct_filler_records = fillers.size();
    if (s.filler_slots > 0)
        s.filler_overlap_rate =
            1.0 - static_cast<double>(s.distinct_filler_records) /
                      static_cast<double>(s.filler_slots);
    return s;
}

/// Writes batches as JSON-lines of record-id lists, family members first.
inline void write_batches(const std::string& path,
                          std::span<const HybridBatch> batches,
                          std::span<const QuestionRecord> records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open batch file for writing: " + path);
    for (const HybridBatch& b : batches) {
        nlohmann::json ids = nlohmann::json::array();
        for (std::size_t m : b.members) ids.push_back(records[m].id);
        out << ids.dump() << '\n';
    }
    if (!out) throw IoError("short write to batch file: " + path);
}

}  // namespace logicloss::data
