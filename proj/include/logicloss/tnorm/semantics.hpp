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

// ── Truth-functional semantics over [0, 1] ──────────────────────────────────
//
// A Semantics picks a t-norm. Apart from the minimum t-norm, every family
// here is described by an additive generator g: a strictly decreasing map
// with g(1) = 0, giving
//
//   T(x, y) = g⁻¹( min{ g(0), g(x) + g(y) } ).
//
// Invariants this header maintains:
//   * g(1) == 0 exactly, g is decreasing; gen_inverse clamps into [0, 1].
//   * g(0) is finite for nilpotent members and +inf for strict ones; the
//     value +inf is a first-class generator value (ext_sub treats
//     inf - inf as 0, which realizes lim g(x) - g(y) for x = y -> 0).
//   * All generator families evaluate through the same g / g⁻¹ path, so
//     parameter values that coincide with a principal t-norm reproduce it
//     to the last bit or within an ulp.
//
// Families:
//   godel             minimum; no generator exists (table evaluation only)
//   lukasiewicz       g(x) = 1 - x                        nilpotent
//   product           g(x) = -log x                       strict
//   schweizer_sklar   g(x) = (1 - x^l) / l, l != 0;       nilpotent iff l > 0
//                     l = 0 degenerates to the product, l = 1 to lukasiewicz
//   frank             g(x) = log((l-1) / (l^x - 1)), l in (0,1) u (1,inf);
//                     l = 1 is the product, l = +inf is lukasiewicz, and
//                     l = 0 degenerates to the minimum (table evaluation)
//
// floor_eps guards generators with a singularity (or unbounded slope) at 0:
// inputs in (0, floor_eps) are lifted to floor_eps before g. Exact zeros are
// never lifted. Polynomial generators skip the guard, and floor_eps = 0
// disables it entirely.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "logicloss/errors.hpp"
#include "logicloss/fol/formula.hpp"

namespace logicloss::tnorm {

enum class Family : std::uint8_t {
    Godel,
    Lukasiewicz,
    Product,
    SchweizerSklar,
    Frank,
};

inline const char* to_string(Family f) {
    switch (f) {
        case Family::Godel: return "godel";
        case Family::Lukasiewicz: return "lukasiewicz";
        case Family::Product: return "product";
        case Family::SchweizerSklar: return "schweizer-sklar";
        case Family::Frank: return "frank";
    }
    return "?";
}

struct Semantics {
    Family family = Family::Product;
    double lambda = 0.0;       // parameter of the two parameterized families
    double floor_eps = 1e-12;  // 0 disables the small-input guard

    static Semantics godel() { return {Family::Godel, 0.0, 0.0}; }
    static Semantics lukasiewicz() { return {Family::Lukasiewicz, 0.0, 0.0}; }
    static Semantics product(double floor_eps = 1e-12) {
        check_floor(floor_eps);
        return {Family::Product, 0.0, floor_eps};
    }
    static Semantics schweizer_sklar(double lambda, double floor_eps = 1e-12) {
        if (!(lambda == lambda) || std::isinf(lambda))
            throw DomainError("schweizer-sklar parameter must be a finite real");
        check_floor(floor_eps);
        return {Family::SchweizerSklar, lambda, floor_eps};
    }
    static Semantics frank(double lambda, double floor_eps = 1e-12) {
        if (!(lambda >= 0.0))
            throw DomainError("frank parameter must lie in [0, +inf]");
        check_floor(floor_eps);
        return {Family::Frank, lambda, floor_eps};
    }

private:
    static void check_floor(double eps) {
        if (!(eps >= 0.0 && eps < 0.5))
            throw DomainError("floor_eps must lie in [0, 0.5)");
    }
};

/// Principal t-norm by name.
inline Semantics named_tnorm(std::string_view name) {
    if (name == "godel" || name == "minimum") return Semantics::godel();
    if (name == "lukasiewicz") return Semantics::lukasiewicz();
    if (name == "product") return Semantics::product();
    throw DomainError("unknown t-norm '" + std::string(name) +
                      "' (expected godel, lukasiewicz, or product)");
}

/// True when the t-norm has no additive generator (minimum t-norm).
inline bool is_table_only(const Semantics& s) {
    return s.family == Family::Godel ||
           (s.family == Family::Frank && s.lambda == 0.0);
}

/// True when g(0) is finite.
inline bool is_nilpotent(const Semantics& s) {
    switch (s.family) {
        case Family::Lukasiewicz: return true;
        case Family::SchweizerSklar: return s.lambda > 0.0;
        case Family::Frank: return std::isinf(s.lambda);
        default: return false;
    }
}

/// True when the t-norm has a generator with g(0) = +inf.
inline bool is_strict(const Semantics& s) {
    return !is_table_only(s) && !is_nilpotent(s);
}

namespace detail {

[[noreturn]] inline void no_generator(const Semantics& s) {
    throw DomainError(std::string("the ") + to_string(s.family) +
                      " t-norm has no additive generator here");
}

inline void check_unit(double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw DomainError("truth degree outside [0, 1]");
}

// Polynomial generators have no singularity at 0 and skip the floor guard.
inline bool polynomial_generator(const Semantics& s) {
    switch (s.family) {
        case Family::Lukasiewicz: return true;
        case Family::Frank: return std::isinf(s.lambda);
        case Family::SchweizerSklar:
            return s.lambda >= 1.0 && s.lambda == std::floor(s.lambda);
        default: return false;
    }
}

inline double floored(const Semantics& s, double x) {
    if (x > 0.0 && x < s.floor_eps && !polynomial_generator(s)) return s.floor_eps;
    return x;
}

inline double clamp_unit(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

}  // namespace detail

/// g(0): +inf for strict members, finite for nilpotent ones.
inline double gen_zero(const Semantics& s) {
    switch (s.family) {
        case Family::Lukasiewicz: return 1.0;
        case Family::SchweizerSklar:
            if (s.lambda == 1.0) return 1.0;
            if (s.lambda > 0.0) return 1.0 / s.lambda;
            return std::numeric_limits<double>::infinity();
        case Family::Frank:
            if (s.lambda == 0.0) detail::no_generator(s);
            return std::isinf(s.lambda) ? 1.0
                                        : std::numeric_limits<double>::infinity();
        case Family::Product: return std::numeric_limits<double>::infinity();
        case Family::Godel: detail::no_generator(s);
    }
    detail::no_generator(s);
}

/// Additive generator g. Throws DomainError off [0, 1] or for table-only
/// semantics.
inline double gen(const Semantics& s, double x) {
    detail::check_unit(x);
    if (is_table_only(s)) detail::no_generator(s);
    if (x == 1.0) return 0.0;
    if (x == 0.0) return gen_zero(s);
    x = detail::floored(s, x);
    switch (s.family) {
        case Family::Lukasiewicz: return 1.0 - x;
        case Family::Product: return -std::log(x);
        case Family::SchweizerSklar:
            if (s.lambda == 0.0) return -std::log(x);
            if (s.lambda == 1.0) return 1.0 - x;
            return (1.0 - std::pow(x, s.lambda)) / s.lambda;
        case Family::Frank: {
            const double l = s.lambda;
            if (l == 1.0) return -std::log(x);
            if (std::isinf(l)) return 1.0 - x;
            // g(x) = log((l - 1) / (l^x - 1)), written sign-safely per side.
            const double p = std::expm1(x * std::log(l));  // l^x - 1
            return l > 1.0 ? std::log(l - 1.0) - std::log(p)
                           : std::log(1.0 - l) - std::log(-p);
        }
        case Family::Godel: break;
    }
    detail::no_generator(s);
}

/// Pseudo-inverse of g: maps y >= g(0) to 0, and clamps into [0, 1].
inline double gen_inverse(const Semantics& s, double y) {
    if (!(y == y)) throw DomainError("generator value is NaN");
    if (is_table_only(s)) detail::no_generator(s);
    if (y < 0.0) y = 0.0;
    if (y >= gen_zero(s)) return 0.0;
    switch (s.family) {
        case Family::Lukasiewicz: return detail::clamp_unit(1.0 - y);
        case Family::Product: return detail::clamp_unit(std::exp(-y));
        case Family::SchweizerSklar:
            if (s.lambda == 0.0) return detail::clamp_unit(std::exp(-y));
            if (s.lambda == 1.0) return detail::clamp_unit(1.0 - y);
            return detail::clamp_unit(std::pow(1.0 - s.lambda * y, 1.0 / s.lambda));
        case Family::Frank: {
            const double l = s.lambda;
            if (l == 1.0) return detail::clamp_unit(std::exp(-y));
            if (std::isinf(l)) return detail::clamp_unit(1.0 - y);
            return detail::clamp_unit(std::log1p((l - 1.0) * std::exp(-y)) /
                                      std::log(l));
        }
        case Family::Godel: break;
    }
    detail::no_generator(s);
}

/// Subtraction over the extended generator range; inf - inf is the limit 0.
inline double ext_sub(double a, double b) {
    if (std::isinf(a) && std::isinf(b) && a > 0.0 && b > 0.0) return 0.0;
    return a - b;
}

/// T(x, y).
inline double tnorm(const Semantics& s, double x, double y) {
    detail::check_unit(x);
    detail::check_unit(y);
    if (is_table_only(s)) return x < y ? x : y;
    const double sum = gen(s, x) + gen(s, y);
    const double cap = gen_zero(s);
    return gen_inverse(s, sum < cap ? sum : cap);
}

/// S(x, y), the dual t-conorm.
inline double tconorm(const Semantics& s, double x, double y) {
    detail::check_unit(x);
    detail::check_unit(y);
    if (is_table_only(s)) return x > y ? x : y;  // exact dual of min
    return 1.0 - tnorm(s, 1.0 - x, 1.0 - y);
}

/// Residuum x => y, the adjoint of T.
inline double residuum(const Semantics& s, double x, double y) {
    detail::check_unit(x);
    detail::check_unit(y);
    if (is_table_only(s)) return x <= y ? 1.0 : y;
    const double d = ext_sub(gen(s, y), gen(s, x));
    return gen_inverse(s, d > 0.0 ? d : 0.0);
}

/// x <=> y as T(x => y, y => x); reduces to g⁻¹(|g(x) - g(y)|).
inline double bi_residual(const Semantics& s, double x, double y) {
    detail::check_unit(x);
    detail::check_unit(y);
    if (is_table_only(s)) return x == y ? 1.0 : (x < y ? x : y);
    return gen_inverse(s, std::fabs(ext_sub(gen(s, x), gen(s, y))));
}

/// ~x as x => 0. The identity 1 - x for nilpotent members, 1 at 0 and 0
/// elsewhere for strict ones.
inline double residual_neg(const Semantics& s, double x) {
    return residuum(s, x, 0.0);
}

/// !x, the involutive negation 1 - x.
inline double strong_neg(const Semantics& s, double x) {
    detail::check_unit(x);
    (void)s;
    return 1.0 - x;
}

/// x -> y as S(!x, y).
inline double material_impl(const Semantics& s, double x, double y) {
    return tconorm(s, strong_neg(s, x), y);
}

inline double eval_connective(const Semantics& s, fol::Connective c, double x) {
    switch (c) {
        case fol::Connective::ResidualNeg: return residual_neg(s, x);
        case fol::Connective::StrongNeg: return strong_neg(s, x);
        default: throw ArityError("binary connective evaluated with one operand");
    }
}

inline double eval_connective(const Semantics& s, fol::Connective c, double x,
                              double y) {
    switch (c) {
        case fol::Connective::StrongConj: return tnorm(s, x, y);
        case fol::Connective::StrongDisj: return tconorm(s, x, y);
        case fol::Connective::WeakConj:
            detail::check_unit(x), detail::check_unit(y);
            return x < y ? x : y;
        case fol::Connective::WeakDisj:
            detail::check_unit(x), detail::check_unit(y);
            return x > y ? x : y;
        case fol::Connective::ResidualImpl: return residuum(s, x, y);
        case fol::Connective::MaterialImpl: return material_impl(s, x, y);
        case fol::Connective::BiResidual: return bi_residual(s, x, y);
        case fol::Connective::ResidualNeg:
        case fol::Connective::StrongNeg:
            throw ArityError("unary connective evaluated with two operands");
    }
    throw ArityError("unknown connective");
}

}  // namespace logicloss::tnorm
