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

#include "logicloss/fol/formula.hpp"
#include "logicloss/fol/parse.hpp"
#include "logicloss/fol/render.hpp"

namespace fol = logicloss::fol;
using fol::Connective;
using fol::Diagnostic;
using fol::Formula;

namespace {

const std::vector<std::string> kVocab = {"p", "q", "r"};

Formula parse_ok(const std::string& text) {
    auto res = fol::parse_formula(text, kVocab);
    INFO(text << (res.ok() ? "" : " -> " + res.error().message));
    REQUIRE(res.ok());
    return std::move(res).value();
}

Diagnostic parse_err(const std::string& text) {
    auto res = fol::parse_formula(text, kVocab);
    INFO(text);
    REQUIRE_FALSE(res.ok());
    return res.error();
}

}  // namespace

TEST_CASE("formula factories validate their arguments", "[fol]") {
    const Formula pa = Formula::task("p", "x");

    CHECK_THROWS_AS(Formula::constant(-0.01), logicloss::DomainError);
    CHECK_THROWS_AS(Formula::constant(1.01), logicloss::DomainError);
    CHECK(Formula::constant(0.0).value() == 0.0);
    CHECK(Formula::constant(1.0).value() == 1.0);

    CHECK_THROWS_AS(Formula::task("", "x"), logicloss::ValidationError);
    CHECK_THROWS_AS(Formula::task("p", ""), logicloss::ValidationError);
    CHECK_THROWS_AS(Formula::answer(""), logicloss::ValidationError);
    CHECK_THROWS_AS(Formula::forall("", pa), logicloss::ValidationError);

    CHECK_THROWS_AS(Formula::unary(Connective::StrongConj, pa), logicloss::ArityError);
    CHECK_THROWS_AS(Formula::binary(Connective::ResidualNeg, pa, pa),
                    logicloss::ArityError);

    CHECK_THROWS_AS(pa.value(), logicloss::Error);
    CHECK_THROWS_AS(pa.lhs(), logicloss::Error);
    CHECK_THROWS_AS(Formula::constant(0.5).variable(), logicloss::Error);
}

TEST_CASE("structural equality ignores sharing, not shape", "[fol]") {
    const Formula a = parse_ok("forall x : p(x) * q(x)");
    const Formula b = parse_ok("forall x : p(x) * q(x)");
    const Formula c = parse_ok("forall x : q(x) * p(x)");
    const Formula d = parse_ok("forall y : p(y) * q(y)");

    CHECK(a == b);
    CHECK(a != c);
    CHECK(a != d);  // binder names are part of the structure
    CHECK(a.depth() == 3);
    CHECK(a.node_count() == 4);
}

TEST_CASE("parsing reaches the canonical spelling", "[fol]") {
    // (input, canonical) pairs; the canonical form must parse to the same tree.
    const std::vector<std::pair<std::string, std::string>> cases = {
        {"forall x : p(x)", "forall x : p(x)"},
        {"forall x : ((p(x)))", "forall x : p(x)"},
        {"forall x : p(x) * q(x) * r(x)", "forall x : p(x) * q(x) * r(x)"},
        {"forall x : p(x) * (q(x) * r(x))", "forall x : p(x) * (q(x) * r(x))"},
        {"forall x : p(x) & q(x) * r(x)", "forall x : p(x) & q(x) * r(x)"},
        {"forall x : p(x) * q(x) (+) r(x)", "forall x : p(x) * q(x) (+) r(x)"},
        {"forall x : (p(x) (+) q(x)) * r(x)", "forall x : (p(x) (+) q(x)) * r(x)"},
        {"forall x : p(x) (+) q(x) | r(x)", "forall x : p(x) (+) q(x) | r(x)"},
        {"forall x : p(x) => q(x) => r(x)", "forall x : p(x) => q(x) => r(x)"},
        {"forall x : (p(x) => q(x)) => r(x)", "forall x : (p(x) => q(x)) => r(x)"},
        {"forall x : p(x) -> q(x) => r(x)", "forall x : p(x) -> q(x) => r(x)"},
        {"forall x : p(x) (+) q(x) => r(x)", "forall x : p(x) (+) q(x) => r(x)"},
        {"forall x : p(x) <=> q(x) <=> r(x)", "forall x : p(x) <=> q(x) <=> r(x)"},
        {"forall x : p(x) <=> (q(x) <=> r(x))", "forall x : p(x) <=> (q(x) <=> r(x))"},
        {"forall x : ~p(x) * !q(x)", "forall x : ~p(x) * !q(x)"},
        {"forall x : ~~p(x)", "forall x : ~~p(x)"},
        {"forall x : ~(p(x) * q(x))", "forall x : ~(p(x) * q(x))"},
        {"forall x : forall y : p(x) * q(y)", "forall x forall y : p(x) * q(y)"},
        {"forall x exists y : p(x) => ans(y)", "forall x exists y : p(x) => ans(y)"},
        {"forall x : (exists y : q(y)) * p(x)", "forall x : (exists y : q(y)) * p(x)"},
        {"forall x : p(x) => .5", "forall x : p(x) => 0.5"},
        {"forall x : p(x) => 1", "forall x : p(x) => 1"},
        {"forall x : 0 (+) p(x)", "forall x : 0 (+) p(x)"},
        {"forall x : p(x) => 0.123456789", "forall x : p(x) => 0.123456789"},
    };
    for (const auto& [input, canonical] : cases) {
        const Formula f = parse_ok(input);
        const std::string rendered = fol::render(f);
        INFO(input);
        CHECK(rendered == canonical);
        CHECK(parse_ok(canonical) == f);
    }
}

TEST_CASE("diagnostics carry a kind and a byte offset", "[fol]") {
    struct Case {
        std::string text;
        Diagnostic::Kind kind;
        std::size_t offset;
    };
    const std::vector<Case> cases = {
        {"", Diagnostic::Kind::Syntax, 0},
        {"p(x", Diagnostic::Kind::Syntax, 3},
        {"forall x : p(x) q(x)", Diagnostic::Kind::Syntax, 16},
        {"forall x : p(x) => 1.5", Diagnostic::Kind::Syntax, 19},
        {"forall x : p(x) => -0.5", Diagnostic::Kind::Syntax, 19},
        {"forall x : p(x) =", Diagnostic::Kind::Syntax, 16},
        {"forall x : p(x) <= q(x)", Diagnostic::Kind::Syntax, 16},
        {"forall x : p()", Diagnostic::Kind::Syntax, 13},
        {"forall x : p(y)", Diagnostic::Kind::UnboundVariable, 13},
        {"forall x : zz(x)", Diagnostic::Kind::UnknownPredicate, 11},
        {"forall x forall x : p(x)", Diagnostic::Kind::DuplicateBinder, 16},
        {"forall x : (forall x : p(x))", Diagnostic::Kind::DuplicateBinder, 19},
    };
    for (const auto& c : cases) {
        const Diagnostic d = parse_err(c.text);
        INFO(c.text << " -> " << fol::to_string(d.kind) << " @" << d.offset << ": "
                    << d.message);
        CHECK(d.kind == c.kind);
        CHECK(d.offset == c.offset);
    }
}

TEST_CASE("the answer predicate is reserved, not part of the vocabulary", "[fol]") {
    const Formula f = parse_ok("forall x : ans(x)");
    CHECK(f.body().kind() == fol::NodeKind::AnswerAtom);
    CHECK(f.body().variable() == "x");
    CHECK(fol::render(f) == "forall x : ans(x)");
}

namespace {

// Random well-formed trees; binders get fresh names so scoping never clashes.
Formula random_formula(std::mt19937_64& rng, std::vector<std::string>& scope,
                       int& next_var, int depth) {
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
    if (depth <= 0 || (!scope.empty() && pick(4) == 0)) {
        switch (pick(3)) {
            case 0: return Formula::task(kVocab[static_cast<std::size_t>(pick(3))],
                                         scope[static_cast<std::size_t>(
                                             pick(static_cast<int>(scope.size())))]);
            case 1: return Formula::answer(scope[static_cast<std::size_t>(
                        pick(static_cast<int>(scope.size())))]);
            default: return Formula::constant(pick(5) * 0.25);
        }
    }
    if (scope.empty() || pick(5) == 0) {
        const std::string var = "v" + std::to_string(next_var++);
        scope.push_back(var);
        Formula body = random_formula(rng, scope, next_var, depth - 1);
        scope.pop_back();
        return pick(2) == 0 ? Formula::forall(var, std::move(body))
                            : Formula::exists(var, std::move(body));
    }
    if (pick(4) == 0) {
        const Connective c =
            pick(2) == 0 ? Connective::ResidualNeg : Connective::StrongNeg;
        return Formula::unary(c, random_formula(rng, scope, next_var, depth - 1));
    }
    static const Connective kBinary[] = {
        Connective::StrongConj, Connective::StrongDisj, Connective::WeakConj,
        Connective::WeakDisj,   Connective::ResidualImpl, Connective::MaterialImpl,
        Connective::BiResidual,
    };
    const Connective c = kBinary[pick(7)];
    Formula lhs = random_formula(rng, scope, next_var, depth - 1);
    Formula rhs = random_formula(rng, scope, next_var, depth - 1);
    return Formula::binary(c, std::move(lhs), std::move(rhs));
}

}  // namespace

TEST_CASE("render and parse are mutually inverse on random trees", "[fol]") {
    std::mt19937_64 rng(20260817ULL);
    for (int iter = 0; iter < 600; ++iter) {
        std::vector<std::string> scope;
        int next_var = 0;
        const Formula f = random_formula(rng, scope, next_var, 6);
        const std::string text = fol::render(f);
        auto back = fol::parse_formula(text, kVocab);
        INFO(text);
        REQUIRE(back.ok());
        CHECK(back.value() == f);
        CHECK(fol::render(back.value()) == text);
    }
}

TEST_CASE("rule files parse line by line", "[fol]") {
    const std::string text =
        "# entailment rules for the demo vocabulary\n"
        "\n"
        "rule \"p-implies-q\": forall x : p(x) => q(x)\n"
        "rule \"p-iff-r\" weight 2.5: forall x : p(x) <=> r(x)\n"
        "   # indented comment\n"
        "rule \"paired\" weight 0: forall x forall y : p(x) * q(y) => ans(x)\n";
    auto res = fol::parse_kb(text, kVocab);
    REQUIRE(res.ok());
    const fol::KnowledgeBase& kb = res.value();
    REQUIRE(kb.rules.size() == 3);
    CHECK(kb.vocab == kVocab);
    CHECK(kb.rules[0].name == "p-implies-q");
    CHECK(kb.rules[0].weight == 1.0);
    CHECK(kb.rules[1].weight == 2.5);
    CHECK(kb.rules[2].weight == 0.0);
    CHECK(fol::render(kb.rules[0]) ==
          "rule \"p-implies-q\": forall x : p(x) => q(x)");
    CHECK(fol::render(kb.rules[1]) ==
          "rule \"p-iff-r\" weight 2.5: forall x : p(x) <=> r(x)");
    CHECK(kb.rules[2].formula ==
          parse_ok("forall x forall y : p(x) * q(y) => ans(x)"));
}

TEST_CASE("rule file diagnostics", "[fol]") {
    SECTION("duplicate rule names are rejected") {
        const std::string text =
            "rule \"a\": forall x : p(x)\n"
            "rule \"a\": forall x : q(x)\n";
        auto res = fol::parse_kb(text, kVocab);
        REQUIRE_FALSE(res.ok());
        CHECK(res.error().kind == Diagnostic::Kind::DuplicateRuleName);
        CHECK(res.error().offset == 31);  // second name, absolute offset
    }
    SECTION("weights must be non-negative") {
        auto res = fol::parse_kb("rule \"a\" weight -2: forall x : p(x)\n", kVocab);
        REQUIRE_FALSE(res.ok());
        CHECK(res.error().kind == Diagnostic::Kind::InvalidWeight);
        CHECK(res.error().offset == 16);
    }
    SECTION("missing header") {
        auto res = fol::parse_kb("forall x : p(x)\n", kVocab);
        REQUIRE_FALSE(res.ok());
        CHECK(res.error().kind == Diagnostic::Kind::Syntax);
    }
    SECTION("unterminated rule name") {
        auto res = fol::parse_kb("rule \"a: forall x : p(x)\n", kVocab);
        REQUIRE_FALSE(res.ok());
        CHECK(res.error().kind == Diagnostic::Kind::Syntax);
        CHECK(res.error().offset == 5);
    }
    SECTION("formula errors surface with absolute offsets") {
        const std::string text =
            "# one\n"
            "rule \"a\": forall x : p(x)\n"
            "rule \"b\": forall x : p(y)\n";
        auto res = fol::parse_kb(text, kVocab);
        REQUIRE_FALSE(res.ok());
        CHECK(res.error().kind == Diagnostic::Kind::UnboundVariable);
        CHECK(res.error().offset == text.find('y'));
    }
}

TEST_CASE("accessing a failed parse result throws", "[fol]") {
    auto res = fol::parse_formula("p(", kVocab);
    REQUIRE_FALSE(res.ok());
    CHECK_THROWS_AS(res.value(), logicloss::ValidationError);
    auto good = fol::parse_formula("forall x : p(x)", kVocab);
    REQUIRE(good.ok());
    CHECK_THROWS_AS(good.error(), logicloss::Error);
}
