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

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "logicloss/data/batcher.hpp"
#include "logicloss/data/record.hpp"
#include "logicloss/detail/rng.hpp"
#include "logicloss/kb/entailment.hpp"

namespace fs = std::filesystem;
using logicloss::DataFileCorrupt;
using logicloss::IoError;
using logicloss::PoolTooSmall;
using logicloss::ValidationError;
using logicloss::data::Family;
using logicloss::data::HybridBatch;
using logicloss::data::QuestionRecord;

namespace {

const std::string kKbDir = LOGICLOSS_KB_DIR;

QuestionRecord mk(std::string id, std::string img, std::string arg,
                  std::string task, std::string ans = "yes",
                  std::vector<std::string> entailed = {}) {
    QuestionRecord r;
    r.id = std::move(id);
    r.image_id = std::move(img);
    r.argument = std::move(arg);
    r.task = std::move(task);
    r.gold_answer = std::move(ans);
    r.entailed_ids = std::move(entailed);
    return r;
}

/// Records spread over n_images images with up to three arguments each and
/// random tasks, so groups contain duplicates and oversized task sets.
std::vector<QuestionRecord> random_records(std::mt19937_64& rng,
                                           std::size_t count,
                                           std::size_t n_images,
                                           const logicloss::kb::EntailmentKB& kb) {
    std::vector<QuestionRecord> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto img = logicloss::detail::uniform_index(rng, n_images);
        const auto arg = logicloss::detail::uniform_index(rng, 3);
        const auto task = logicloss::detail::uniform_index(rng, kb.tasks().size());
        out.push_back(mk("q" + std::to_string(i), "img" + std::to_string(img),
                         "arg" + std::to_string(arg),
                         kb.tasks()[task].name));
    }
    return out;
}

struct TempFile {
    fs::path path;
    explicit TempFile(const char* stem) {
        static int counter = 0;
        path = fs::temp_directory_path() /
               (std::string(stem) + std::to_string(counter++) + ".jsonl");
    }
    ~TempFile() {
        std::error_code ec;
        fs::remove(path, ec);
    }
};

}  // namespace

TEST_CASE("record jsonl round trip and validation", "[batcher]") {
    std::vector<QuestionRecord> records{
        mk("q0", "img0", "scene", "verifyGlobalTrue", "yes", {"q1", "q2"}),
        mk("q1", "img0", "scene", "verifyGlobalFalse", "no"),
        mk("q2", "img0", "scene", "queryGlobal", "beach"),
    };
    records[0].features = {0.25, -1.5, 3.0};

    SECTION("write then read preserves every field") {
        TempFile f("records");
        logicloss::data::write_records(f.path.string(), records);
        const auto back = logicloss::data::read_records(f.path.string());
        REQUIRE(back.size() == 3);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(back[i].id == records[i].id);
            CHECK(back[i].image_id == records[i].image_id);
            CHECK(back[i].argument == records[i].argument);
            CHECK(back[i].task == records[i].task);
            CHECK(back[i].gold_answer == records[i].gold_answer);
            CHECK(back[i].entailed_ids == records[i].entailed_ids);
            CHECK(back[i].features == records[i].features);
        }
    }

    SECTION("features key may be null or absent") {
        TempFile f("records");
        std::ofstream out(f.path);
        out << R"({"id":"a","imageId":"i","argument":"x","semantic":"queryAttr",)"
            << R"("answer":"red","entailed":[],"features":null})" << "\n\n"
            << R"({"id":"b","imageId":"i","argument":"x","semantic":"chooseAttr",)"
            << R"("answer":"red","entailed":[]})" << '\n';
        out.close();
        const auto back = logicloss::data::read_records(f.path.string());
        REQUIRE(back.size() == 2);
        CHECK(back[0].features.empty());
        CHECK(back[1].features.empty());
    }

    SECTION("missing file raises IoError") {
        CHECK_THROWS_AS(logicloss::data::read_records("/no/such/file.jsonl"),
                        IoError);
    }

    SECTION("malformed line reports its line number") {
        TempFile f("records");
        std::ofstream out(f.path);
        out << R"({"id":"a","imageId":"i","argument":"x","semantic":"queryAttr",)"
            << R"("answer":"red","entailed":[]})" << '\n'
            << "{not json\n";
        out.close();
        CHECK_THROWS_WITH(logicloss::data::read_records(f.path.string()),
                          Catch::Matchers::ContainsSubstring(":2:"));
    }

    SECTION("missing key raises DataFileCorrupt") {
        TempFile f("records");
        std::ofstream out(f.path);
        out << R"({"id":"a","imageId":"i","argument":"x"})" << '\n';
        out.close();
        CHECK_THROWS_AS(logicloss::data::read_records(f.path.string()),
                        DataFileCorrupt);
    }

    SECTION("validate_records accepts the fixture") {
        const auto kb = logicloss::kb::EntailmentKB::load(kKbDir);
        CHECK_NOTHROW(logicloss::data::validate_records(records, kb.vocab()));
    }

    SECTION("validate_records names each offender") {
        const auto kb = logicloss::kb::EntailmentKB::load(kKbDir);
        auto bad = records;
        bad.push_back(mk("q0", "img9", "scene", "queryAttr"));      // dup id
        bad.push_back(mk("q9", "img9", "scene", "notATask"));       // bad task
        bad.push_back(mk("q10", "img9", "scene", "queryAttr", "r", {"zzz"}));
        try {
            logicloss::data::validate_records(bad, kb.vocab());
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            const std::string what = e.what();
            CHECK(what.find("q0 (duplicate id)") != std::string::npos);
            CHECK(what.find("q9 (unknown task)") != std::string::npos);
            CHECK(what.find("q10 (dangling entailed id)") != std::string::npos);
        }
    }
}

TEST_CASE("family grouping", "[batcher]") {
    SECTION("the four-question scene group forms one family") {
        std::vector<QuestionRecord> records{
            mk("q0", "beach1", "scene", "verifyGlobalTrue", "yes"),
            mk("q1", "beach1", "scene", "verifyGlobalFalse", "no"),
            mk("q2", "beach1", "scene", "queryGlobal", "beach"),
            mk("q3", "beach1", "scene", "chooseGlobal", "beach"),
        };
        const auto fams = logicloss::data::group_families(records);
        REQUIRE(fams.size() == 1);
        CHECK(fams[0].image_id == "beach1");
        CHECK(fams[0].argument == "scene");
        CHECK(fams[0].members == std::vector<std::size_t>{0, 1, 2, 3});
    }

    SECTION("empty input yields no families") {
        CHECK(logicloss::data::group_families({}).empty());
    }

    SECTION("seven distinct tasks split six plus one") {
        std::vector<QuestionRecord> records;
        const char* tasks[] = {"verifyAttrTrue",  "verifyAttrFalse", "queryAttr",
                               "chooseAttr",      "existAttrTrue",   "existAttrNotTrue",
                               "existAttrOrTrue"};
        for (int i = 0; i < 7; ++i)
            records.push_back(mk("q" + std::to_string(i), "img0", "cat", tasks[i]));
        const auto fams = logicloss::data::group_families(records);
        REQUIRE(fams.size() == 2);
        CHECK(fams[0].members.size() == 6);
        CHECK(fams[1].members == std::vector<std::size_t>{6});
    }

    SECTION("a duplicate task opens a second family instead of dropping") {
        std::vector<QuestionRecord> records{
            mk("q0", "img0", "dog", "queryAttr", "brown"),
            mk("q1", "img0", "dog", "verifyAttrTrue", "yes"),
            mk("q2", "img0", "dog", "queryAttr", "brown"),
        };
        const auto fams = logicloss::data::group_families(records);
        REQUIRE(fams.size() == 2);
        CHECK(fams[0].members == std::vector<std::size_t>{0, 1});
        CHECK(fams[1].members == std::vector<std::size_t>{2});
    }

    SECTION("grouping keys on image and argument jointly") {
        std::vector<QuestionRecord> records{
            mk("q0", "img0", "dog", "queryAttr"),
            mk("q1", "img1", "dog", "queryAttr"),
            mk("q2", "img0", "cat", "queryAttr"),
        };
        const auto fams = logicloss::data::group_families(records);
        CHECK(fams.size() == 3);
    }

    SECTION("random sets partition exactly with unique tasks per family") {
        std::mt19937_64 rng(7);
        const auto kb = logicloss::kb::EntailmentKB::load(kKbDir);
        const auto records = random_records(rng, 400, 25, kb);
        const auto fams = logicloss::data::group_families(records);

        std::vector<int> seen(records.size(), 0);
        for (const Family& f : fams) {
            REQUIRE(f.members.size() >= 1);
            REQUIRE(f.members.size() <= logicloss::data::kMaxFamilySize);
            std::set<std::string> tasks;
            for (std::size_t m : f.members) {
                seen[m] += 1;
                CHECK(records[m].image_id == f.image_id);
                CHECK(records[m].argument == f.argument);
                tasks.insert(records[m].task);
            }
            CHECK(tasks.size() == f.members.size());
        }
        CHECK(std::all_of(seen.begin(), seen.end(),
                          [](int c) { return c == 1; }));
    }
}

TEST_CASE("hybrid batch assembly", "[batcher]") {
    std::mt19937_64 rng(11);
    const auto kb = logicloss::kb::EntailmentKB::load(kKbDir);
    const auto records = random_records(rng, 300, 20, kb);
    const auto fams = logicloss::data::group_families(records);
    REQUIRE(fams.size() >= 10);

    SECTION("every batch holds the family prefix plus distinct fillers") {
        const auto batches =
            logicloss::data::build_hybrid_batches(fams, records, 16, 42);
        REQUIRE(batches.size() == fams.size());
        for (std::size_t i = 0; i < batches.size(); ++i) {
            const HybridBatch& b = batches[i];
            CHECK(b.family_index == i);
            CHECK(b.family_size == fams[i].members.size());
            REQUIRE(b.members.size() == 16);
            for (std::size_t k = 0; k < b.family_size; ++k)
                CHECK(b.members[k] == fams[i].members[k]);
            std::set<std::size_t> distinct(b.members.begin(), b.members.end());
            CHECK(distinct.size() == 16);
        }
    }

    SECTION("identical seeds reproduce identical batch sequences") {
        const auto a = logicloss::data::build_hybrid_batches(fams, records, 16, 9);
        const auto b = logicloss::data::build_hybrid_batches(fams, records, 16, 9);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(a[i].members == b[i].members);
    }

    SECTION("different seeds change at least one filler") {
        const auto a = logicloss::data::build_hybrid_batches(fams, records, 16, 9);
        const auto b = logicloss::data::build_hybrid_batches(fams, records, 16, 10);
        bool differs = false;
        for (std::size_t i = 0; i < a.size() && !differs; ++i)
            differs = a[i].members != b[i].members;
        CHECK(differs);
    }

    SECTION("rejects undersized batches and empty pools") {
        CHECK_THROWS_AS(logicloss::data::build_hybrid_batches(fams, records, 5, 1),
                        ValidationError);
        CHECK_THROWS_AS(logicloss::data::build_hybrid_batches(fams, {}, 16, 1),
                        ValidationError);
    }

    SECTION("a pool smaller than the batch cannot be filled") {
        std::vector<QuestionRecord> tiny(records.begin(), records.begin() + 10);
        const auto tiny_fams = logicloss::data::group_families(tiny);
        CHECK_THROWS_AS(
            logicloss::data::build_hybrid_batches(tiny_fams, tiny, 16, 1),
            PoolTooSmall);
    }

    SECTION("a barely sufficient pool fills without repeats") {
        std::vector<QuestionRecord> tiny(records.begin(), records.begin() + 16);
        const auto tiny_fams = logicloss::data::group_families(tiny);
        const auto batches =
            logicloss::data::build_hybrid_batches(tiny_fams, tiny, 16, 3);
        for (const HybridBatch& b : batches) {
            std::set<std::size_t> distinct(b.members.begin(), b.members.end());
            CHECK(distinct.size() == 16);
        }
    }
}

TEST_CASE("batch statistics and output", "[batcher]") {
    SECTION("single batch histogram") {
        std::vector<QuestionRecord> records{
            mk("q0", "img0", "scene", "verifyGlobalTrue"),
            mk("q1", "img0", "scene", "verifyGlobalFalse"),
            mk("q2", "img0", "scene", "queryGlobal"),
            mk("q3", "img0", "scene", "chooseGlobal"),
            mk("q4", "img1", "scene", "queryGlobal"),
            mk("q5", "img1", "scene", "chooseGlobal"),
            mk("q6", "img2", "scene", "queryGlobal"),
            mk("q7", "img2", "scene", "verifyGlobalTrue"),
        };
        std::vector<Family> one{Family{"img0", "scene", {0, 1, 2, 3}}};
        const auto batches =
            logicloss::data::build_hybrid_batches(one, records, 8, 5);
        const auto s = logicloss::data::batch_stats(batches, records);
        CHECK(s.batches == 1);
        REQUIRE(s.family_size_hist.size() == 1);
        CHECK(s.family_size_hist.at(4) == 1);
        CHECK(s.distinct_family_tasks == 4);
        CHECK(s.filler_slots == 4);
        CHECK(s.distinct_filler_records == 4);
        CHECK(s.filler_overlap_rate == 0.0);
    }

    SECTION("empty input gives the all-zero summary") {
        const auto s = logicloss::data::batch_stats({}, {});
        CHECK(s.batches == 0);
        CHECK(s.family_size_hist.empty());
        CHECK(s.distinct_family_tasks == 0);
        CHECK(s.filler_slots == 0);
        CHECK(s.distinct_filler_records == 0);
        CHECK(s.filler_overlap_rate == 0.0);
    }

    SECTION("stats match a brute-force recount on a random set") {
        std::mt19937_64 rng(23);
        const auto kb = logicloss::kb::EntailmentKB::load(kKbDir);
        const auto records = random_records(rng, 350, 18, kb);
        const auto fams = logicloss::data::group_families(records);
        const auto batches =
            logicloss::data::build_hybrid_batches(fams, records, 16, 77);
        const auto s = logicloss::data::batch_stats(batches, records);

        std::map<std::size_t, std::size_t> hist;
        std::set<std::string> tasks;
        std::set<std::size_t> fillers;
        std::size_t slots = 0;
        for (const HybridBatch& b : batches) {
            hist[b.family_size] += 1;
            for (std::size_t k = 0; k < b.members.size(); ++k) {
                if (k < b.family_size)
                    tasks.insert(records[b.members[k]].task);
                else {
                    fillers.insert(b.members[k]);
                    ++slots;
                }
            }
        }
        CHECK(s.batches == batches.size());
        CHECK(std::map<std::size_t, std::size_t>(s.family_size_hist.begin(),
                                                 s.family_size_hist.end()) == hist);
        CHECK(s.distinct_family_tasks == tasks.size());
        CHECK(s.filler_slots == slots);
        CHECK(s.distinct_filler_records == fillers.size());
        CHECK(s.filler_overlap_rate ==
              1.0 - static_cast<double>(fillers.size()) /
                        static_cast<double>(slots));
    }

    SECTION("batch files hold one id list per line, family first") {
        std::vector<QuestionRecord> records{
            mk("q0", "img0", "scene", "verifyGlobalTrue"),
            mk("q1", "img0", "scene", "verifyGlobalFalse"),
            mk("q2", "img1", "scene", "queryGlobal"),
            mk("q3", "img1", "scene", "chooseGlobal"),
            mk("q4", "img2", "scene", "queryGlobal"),
            mk("q5", "img2", "scene", "verifyGlobalTrue"),
        };
        const auto fams = logicloss::data::group_families(records);
        const auto batches =
            logicloss::data::build_hybrid_batches(fams, records, 6, 2);
        TempFile f("batches");
        logicloss::data::write_batches(f.path.string(), batches, records);

        std::ifstream in(f.path);
        std::string line;
        std::size_t n = 0;
        while (std::getline(in, line)) {
            const auto ids = nlohmann::json::parse(line);
            REQUIRE(ids.is_array());
            REQUIRE(ids.size() == 6);
            for (std::size_t k = 0; k < batches[n].family_size; ++k)
                CHECK(ids[k].get<std::string>() ==
                      records[batches[n].members[k]].id);
            ++n;
        }
        CHECK(n == batches.size());
    }
}
