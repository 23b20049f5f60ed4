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

// The 48 semantic-task names, ASCII-sorted. This is the fixed vocabulary the
// task head predicts over; the tasks.json data file must list exactly these
// names, which load() enforces, so task indices agree everywhere whether or
// not the rule base is loaded.

#include <array>
#include <string_view>

namespace logicloss::kb {

inline constexpr std::array<std::string_view, 48> kTaskNames = {
    "allDiffFalse",
    "allDiffTrue",
    "allSameFalse",
    "allSameTrue",
    "chooseAttr",
    "chooseGlobal",
    "chooseObj",
    "chooseRel",
    "common",
    "compare",
    "existAndFalse",
    "existAndTrue",
    "existAttrFalse",
    "existAttrNotFalse",
    "existAttrNotTrue",
    "existAttrOrFalse",
    "existAttrOrTrue",
    "existAttrTrue",
    "existFalse",
    "existNotFalse",
    "existNotOrFalse",
    "existNotOrTrue",
    "existNotTrue",
    "existOrFalse",
    "existOrTrue",
    "existRelFalse",
    "existRelTrue",
    "existTrue",
    "queryAttr",
    "queryAttrObj",
    "queryGlobal",
    "queryNotObj",
    "queryObj",
    "queryRel",
    "twoDiffFalse",
    "twoDiffTrue",
    "twoSameFalse",
    "twoSameTrue",
    "verifyAttrAndFalse",
    "verifyAttrAndTrue",
    "verifyAttrFalse",
    "verifyAttrTrue",
    "verifyAttrsFalse",
    "verifyAttrsTrue",
    "verifyGlobalFalse",
    "verifyGlobalTrue",
    "verifyRelFalse",
    "verifyRelTrue",
};

}  // namespace logicloss::kb
