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

// Synthetic question datasets with entailment structure.
//
// Every image contributes up to three families: one about the scene, one
// about an object's attribute, and (two images in three) one about a
// relation between two objects. Family members share an argument and a
// content word; their gold answers are mutually consistent by construction
// (a true-verify forces "yes", its false twin forces "no", query and choose
// name the content word). Entailed ids follow the rule base's edges between
// the tasks present in the family.
//
// Features are 22-dimensional, three slots:
//   [0,10)  task code: which semantic task the question performs;
//   [10,16) image slot: the content word the image actually shows;
//   [16,22) asked slot: the content word the question mentions, if any.
// Yes-answer tasks mention the true word, no-answer tasks a distractor,
// choose offers a distractor alternative, query mentions nothing (zeros).
// A verify answer is therefore a comparison between the image and asked
// slots, and a query answer is read off the image slot, as in VQA.
//
// Codes are fixed pseudo-random unit-scale Gaussians derived from the task
// or content name, never from the dataset seed, so separately generated
// train and evaluation sets share one feature geometry. Noise: the image
// slot carries a distortion drawn once per family (all members describe the
// same image), and every dimension carries a per-record jitter at a third
// of the family scale. The shared distortion correlates errors within a
// family, which is what the consistency metric and the family-aware
// training regimes act on.

#include <cstdint>
#include <cstdio>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "logicloss/data/record.hpp"
#include "logicloss/detail/rng.hpp"
#include "logicloss/errors.hpp"
#include "logicloss/kb/entailment.hpp"

namespace logicloss::train {

inline constexpr int kFeatureDim = 22;
inline constexpr int kTaskCodeDim = 10;
inline constexpr int kContentDim = 6;
inline constexpr double kDefaultNoise = 0.9;

namespace detail {

struct TaskTemplate {
    const char* task;
    char answer;  // 'y' yes, 'n' no, 'c' the content word
    char asked;   // 'c' content word, 'd' distractor, '0' nothing
};

// Within each family every observable task form either names a content
// answer or appears with both polarities, so no form has a constant gold
// answer and the image slot must actually be read.
inline constexpr TaskTemplate kGlobalFamily[] = {
    {"verifyGlobalTrue", 'y', 'c'},
    {"verifyGlobalFalse", 'n', 'd'},
    {"queryGlobal", 'c', '0'},
    {"chooseGlobal", 'c', 'd'},
};
inline constexpr TaskTemplate kAttrFamily[] = {
    {"verifyAttrTrue", 'y', 'c'},
    {"verifyAttrFalse", 'n', 'd'},
    {"queryAttr", 'c', '0'},
    {"chooseAttr", 'c', 'd'},
};
inline constexpr TaskTemplate kRelFamily[] = {
    {"verifyRelTrue", 'y', 'c'},  {"verifyRelFalse", 'n', 'd'},
    {"existRelTrue", 'y', 'c'},   {"existRelFalse", 'n', 'd'},
    {"queryRel", 'c', '0'},       {"chooseRel", 'c', 'd'},
};

// Wide content vocabularies keep the open tasks (naming a word from the
// noisy image slot) well below the binary tasks in accuracy, as in VQA.
inline constexpr const char* kScenes[] = {
    "beach",  "kitchen", "street", "forest",  "office",  "bedroom",
    "garden", "harbor",  "market", "museum",  "stadium", "subway"};
inline constexpr const char* kAttrs[] = {
    "red",     "blue",  "green",   "wooden",  "metal",   "round",  "striped",
    "shiny",   "plastic", "leather", "tall",  "curved",  "glossy", "woven"};
inline constexpr const char* kRelations[] = {"holding", "above",   "beside",
                                             "behind",  "leftOf",  "rightOf",
                                             "under",   "near"};
inline constexpr const char* kObjects[] = {"dog",   "chair", "car", "tree",
                                           "ball",  "cup",   "bird"};

/// Fixed code for a name: unit Gaussians from an engine seeded by the name.
inline void name_code(std::string_view name, std::uint64_t salt,
                      std::span<double> out) {
    std::mt19937_64 rng(logicloss::detail::fnv1a64(name) ^ salt);
    for (double& v : out) v = logicloss::detail::gaussian(rng);
}

/// What a question reveals about its task: the name minus the gold-polarity
/// suffix. "verifyGlobalTrue" and "verifyGlobalFalse" read identically; only
/// the image decides between them.
inline std::string_view observable_form(std::string_view task) {
    if (task.ends_with("True")) task.remove_suffix(4);
    else if (task.ends_with("False")) task.remove_suffix(5);
    return task;
}

}  // namespace detail

/// All answers a generated dataset can contain, regardless of seed or size.
inline std::vector<std::string> synthetic_answer_universe() {
    std::vector<std::string> out{"yes", "no"};
    for (const char* s : detail::kScenes) out.emplace_back(s);
    for (const char* s : detail::kAttrs) out.emplace_back(s);
    for (const char* s : detail::kRelations) out.emplace_back(s);
    return out;
}

/// Generates records for n_images images. Identical arguments give
/// byte-identical records. `noise` scales the per-record feature noise.
inline std::vector<data::QuestionRecord> generate_synthetic(
    const kb::EntailmentKB& base, int n_images, std::uint64_t seed,
    double noise = kDefaultNoise) {
    if (n_images < 0) throw ValidationError("image count must be nonnegative");
    // adjacency over task indices; a bi-implication entails both ways
    std::vector<std::vector<int>> entails(base.vocab().size());
    for (const kb::EntailmentRule& r : base.rules()) {
        entails[static_cast<std::size_t>(r.src)].push_back(r.dst);
        if (r.conn == fol::Connective::BiResidual)
            entails[static_cast<std::size_t>(r.dst)].push_back(r.src);
    }

    std::mt19937_64 gen(logicloss::detail::derive_seed(seed, 0x64617461u));
    std::vector<data::QuestionRecord> out;
    out.reserve(static_cast<std::size_t>(n_images) * 9);
    long next_id = 0;
    char buf[16];

    const auto emit_family = [&](const std::string& image_id,
                                 std::string argument,
                                 std::span<const char* const> domain,
                                 std::size_t content_idx,
                                 std::span<const detail::TaskTemplate> tmpl) {
        const char* content = domain[content_idx];
        const std::size_t size =
            1 + static_cast<std::size_t>(
                    logicloss::detail::uniform_index(gen, tmpl.size()));
        const std::size_t start = static_cast<std::size_t>(
            logicloss::detail::uniform_index(gen, tmpl.size()));
        double shared[kContentDim];  // one image distortion for the family
        for (double& v : shared) v = noise * logicloss::detail::gaussian(gen);
        const std::size_t first = out.size();
        for (std::size_t k = 0; k < size; ++k) {
            const detail::TaskTemplate& t = tmpl[(start + k) % tmpl.size()];
            data::QuestionRecord r;
            std::snprintf(buf, sizeof buf, "q%06ld", next_id++);
            r.id = buf;
            r.image_id = image_id;
            r.argument = argument;
            r.task = t.task;
            r.gold_answer = t.answer == 'y'   ? "yes"
                            : t.answer == 'n' ? "no"
                                              : content;
            r.features.resize(kFeatureDim);
            detail::name_code(detail::observable_form(r.task), 0x7461736bu,
                              std::span<double>(r.features.data(), kTaskCodeDim));
            detail::name_code(content, 0x636f6e74u,
                              std::span<double>(r.features.data() + kTaskCodeDim,
                                                kContentDim));
            if (t.asked != '0') {
                const char* asked = content;
                if (t.asked == 'd')
                    asked = domain[(content_idx + 1 +
                                    logicloss::detail::uniform_index(
                                        gen, domain.size() - 1)) %
                                   domain.size()];
                // same salt as the image slot: matching words match as codes
                detail::name_code(
                    asked, 0x636f6e74u,
                    std::span<double>(
                        r.features.data() + kTaskCodeDim + kContentDim,
                        kContentDim));
            }
            // only the image slot is noisy; the question side (task code
            // and asked word) is read exactly, as text is
            for (int d = 0; d < kContentDim; ++d)
                r.features[static_cast<std::size_t>(kTaskCodeDim + d)] +=
                    shared[d] +
                    (noise / 3.0) * logicloss::detail::gaussian(gen);
            out.push_back(std::move(r));
        }
        // link members along the rule base's edges
        for (std::size_t i = first; i < out.size(); ++i) {
            const int src = base.vocab().index(out[i].task);
            for (int dst : entails[static_cast<std::size_t>(src)])
                for (std::size_t j = first; j < out.size(); ++j)
                    if (i != j && base.vocab().index(out[j].task) == dst)
                        out[i].entailed_ids.push_back(out[j].id);
        }
    };

    using logicloss::detail::uniform_index;
    for (int img = 0; img < n_images; ++img) {
        std::snprintf(buf, sizeof buf, "img%05d", img);
        const std::string image_id = buf;
        const std::size_t scene =
            uniform_index(gen, std::size(detail::kScenes));
        const std::size_t obj1 =
            uniform_index(gen, std::size(detail::kObjects));
        const std::size_t obj2 =
            (obj1 + 1 + uniform_index(gen, std::size(detail::kObjects) - 1)) %
            std::size(detail::kObjects);
        const std::size_t attr =
            uniform_index(gen, std::size(detail::kAttrs));
        const std::size_t rel =
            uniform_index(gen, std::size(detail::kRelations));

        emit_family(image_id, "scene", detail::kScenes, scene,
                    detail::kGlobalFamily);
        emit_family(image_id, detail::kObjects[obj1], detail::kAttrs, attr,
                    detail::kAttrFamily);
        if (img % 3 != 2)
            emit_family(image_id, detail::kObjects[obj2], detail::kRelations,
                        rel, detail::kRelFamily);
    }
    return out;
}

/// Splits a generated dataset on its image boundary: records of the first
/// n_head images (in order of first appearance) go left, the rest right.
/// Families never span images, so both halves keep whole families.
inline std::pair<std::vector<data::QuestionRecord>,
                 std::vector<data::QuestionRecord>>
split_by_image(std::span<const data::QuestionRecord> records, int n_head) {
    std::pair<std::vector<data::QuestionRecord>, std::vector<data::QuestionRecord>>
        out;
    int images_seen = 0;
    const std::string* last = nullptr;
    for (const data::QuestionRecord& r : records) {
        if (last == nullptr || r.image_id != *last) {
            ++images_seen;
            last = &r.image_id;
        }
        (images_seen <= n_head ? out.first : out.second).push_back(r);
    }
    return out;
}

}  // namespace logicloss::train
