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

// Deterministic random helpers. std::mt19937_64 has a fully specified output
// sequence, but the standard distributions do not, so every draw that must
// reproduce bit-for-bit across toolchains goes through the helpers below.

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace logicloss::detail {

/// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
inline double canonical(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1); rejects exact zero so logs stay finite.
inline double canonical_open(std::mt19937_64& rng) {
    double u = canonical(rng);
    while (u == 0.0) u = canonical(rng);
    return u;
}

/// Uniform integer in [0, n). n must be positive. Uses rejection so the
/// result is exactly uniform and reproducible.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t draw = rng();
    while (draw >= limit) draw = rng();
    return draw % n;
}

/// Standard normal via Box-Muller. Stateless pair form: each call consumes
/// exactly two engine draws, which keeps per-site streams independent.
inline double gaussian(std::mt19937_64& rng) {
    const double u1 = canonical_open(rng);
    const double u2 = canonical(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

/// FNV-1a 64-bit hash; used for data-file checksums and name-derived seeds.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

/// splitmix64 step; combines seeds without correlating the derived streams.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Derives an independent child seed from (seed, stream tag).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed ^ mix64(stream));
}

}  // namespace logicloss::detail
