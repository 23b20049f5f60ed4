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

// ── Surface syntax ──────────────────────────────────────────────────────────
//
//   formula    := ('forall' | 'exists') VAR ... ':' formula | iff
//   iff        := impl ('<=>' impl)*                  left associative
//   impl       := disj (('=>' | '->') impl)?          right associative
//   disj       := conj (('(+)' | '|') conj)*          left associative
//   conj       := neg  (('*' | '&') neg)*             left associative
//   neg        := ('~' | '!')* primary
//   primary    := NUMBER | IDENT '(' VAR ')' | '(' formula ')'
//
// Binding is tightest to loosest: negations, then * and & together, then
// (+) and |, then => and ->, then <=>. A quantifier prefix extends to the
// end of the formula (or of its parenthesized group).
//
// Parsing is total: any byte string yields either a Formula or a Diagnostic,
// never an exception. Validation happens during the same pass: predicate
// names must come from the supplied vocabulary ("ans" is reserved), every
// atom variable must be bound by exactly one enclosing quantifier, and
// constants must lie in [0, 1].
//
// Rule files are line oriented: blank lines and lines starting with '#' are
// skipped; every other line must read
//
//   rule "<name>" [weight <w>]: <formula>

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "logicloss/detail/numfmt.hpp"
#include "logicloss/fol/formula.hpp"

namespace logicloss::fol {

struct Diagnostic {
    enum class Kind {
        Syntax,
        UnknownPredicate,
        UnboundVariable,
        DuplicateBinder,
        DuplicateRuleName,
        InvalidWeight,
    };
    Kind kind = Kind::Syntax;
    std::size_t offset = 0;  // byte offset into the parsed text
    std::string message;
};

inline const char* to_string(Diagnostic::Kind k) {
    switch (k) {
        case Diagnostic::Kind::Syntax: return "syntax";
        case Diagnostic::Kind::UnknownPredicate: return "unknown-predicate";
        case Diagnostic::Kind::UnboundVariable: return "unbound-variable";
        case Diagnostic::Kind::DuplicateBinder: return "duplicate-binder";
        case Diagnostic::Kind::DuplicateRuleName: return "duplicate-rule-name";
        case Diagnostic::Kind::InvalidWeight: return "invalid-weight";
    }
    return "?";
}

/// Either a parsed value or the first diagnostic encountered.
template <class T>
class ParseResult {
public:
    ParseResult(T value) : v_(std::move(value)) {}
    ParseResult(Diagnostic d) : v_(std::move(d)) {}

    bool ok() const { return std::holds_alternative<T>(v_); }
    explicit operator bool() const { return ok(); }

    const T& value() const& {
        if (!ok()) throw ValidationError("parse failed: " + error().message);
        return std::get<T>(v_);
    }
    T&& value() && {
        if (!ok()) throw ValidationError("parse failed: " + error().message);
        return std::get<T>(std::move(v_));
    }
    const Diagnostic& error() const {
        if (ok()) throw Error("ParseResult holds a value, not a diagnostic");
        return std::get<Diagnostic>(v_);
    }

private:
    std::variant<T, Diagnostic> v_;
};

namespace detail {

struct Token {
    enum class Kind {
        Ident, Number, String,
        LParen, RParen, Colon,
        Star, OPlus, Amp, Pipe,
        FatArrow, ThinArrow, Iff,
        Tilde, Bang,
        End,
    };
    Kind kind = Kind::End;
    std::string text;
    double number = 0.0;
    std::size_t pos = 0;
};

// Thrown inside the parser, converted to a Diagnostic at the entry points.
struct Abort {
    Diagnostic diag;
};

[[noreturn]] inline void fail(Diagnostic::Kind kind, std::size_t pos, std::string msg) {
    throw Abort{Diagnostic{kind, pos, std::move(msg)}};
}

inline bool ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool ident_char(char c) {
    return ident_start(c) || (c >= '0' && c <= '9');
}
inline bool digit(char c) { return c >= '0' && c <= '9'; }

inline std::vector<Token> lex(std::string_view text, std::size_t base_offset) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto push = [&](Token::Kind k, std::size_t pos, std::string s = {}) {
        out.push_back(Token{k, std::move(s), 0.0, base_offset + pos});
    };
    while (i < n) {
        const char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (ident_start(c)) {
            while (i < n && ident_char(text[i])) ++i;
            push(Token::Kind::Ident, start, std::string(text.substr(start, i - start)));
            continue;
        }
        const bool neg_number =
            c == '-' && i + 1 < n &&
            (digit(text[i + 1]) ||
             (text[i + 1] == '.' && i + 2 < n && digit(text[i + 2])));
        if (digit(c) || neg_number || (c == '.' && i + 1 < n && digit(text[i + 1]))) {
            if (neg_number) ++i;
            while (i < n && (digit(text[i]) || text[i] == '.')) ++i;
            double v = 0.0;
            if (!logicloss::detail::parse_double(text.data() + start, text.data() + i, v))
                fail(Diagnostic::Kind::Syntax, base_offset + start, "malformed number");
            Token t{Token::Kind::Number, std::string(text.substr(start, i - start)), v,
                    base_offset + start};
            out.push_back(std::move(t));
            continue;
        }
        switch (c) {
            case '"': {
                ++i;
                const std::size_t s = i;
                while (i < n && text[i] != '"' && text[i] != '\n') ++i;
                if (i >= n || text[i] != '"')
                    fail(Diagnostic::Kind::Syntax, base_offset + start,
                         "unterminated string");
                push(Token::Kind::String, start, std::string(text.substr(s, i - s)));
                ++i;
                continue;
            }
            case '(':
                if (i + 2 < n && text[i + 1] == '+' && text[i + 2] == ')') {
                    push(Token::Kind::OPlus, start);
                    i += 3;
                } else {
                    push(Token::Kind::LParen, start);
                    ++i;
                }
                continue;
            case ')': push(Token::Kind::RParen, start); ++i; continue;
            case ':': push(Token::Kind::Colon, start); ++i; continue;
            case '*': push(Token::Kind::Star, start); ++i; continue;
            case '&': push(Token::Kind::Amp, start); ++i; continue;
            case '|': push(Token::Kind::Pipe, start); ++i; continue;
            case '~': push(Token::Kind::Tilde, start); ++i; continue;
            case '!': push(Token::Kind::Bang, start); ++i; continue;
            case '=':
                if (i + 1 < n && text[i + 1] == '>') {
                    push(Token::Kind::FatArrow, start);
                    i += 2;
                    continue;
                }
                fail(Diagnostic::Kind::Syntax, base_offset + start, "expected '=>'");
            case '-':
                if (i + 1 < n && text[i + 1] == '>') {
                    push(Token::Kind::ThinArrow, start);
                    i += 2;
                    continue;
                }
                fail(Diagnostic::Kind::Syntax, base_offset + start, "expected '->'");
            case '<':
                if (i + 2 < n && text[i + 1] == '=' && text[i + 2] == '>') {
                    push(Token::Kind::Iff, start);
                    i += 3;
                    continue;
                }
                fail(Diagnostic::Kind::Syntax, base_offset + start, "expected '<=>'");
            default:
                fail(Diagnostic::Kind::Syntax, base_offset + start,
                     std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back(Token{Token::Kind::End, {}, 0.0, base_offset + n});
    return out;
}

class FormulaParser {
public:
    FormulaParser(std::vector<Token> tokens, const std::vector<std::string>& vocab)
        : toks_(std::move(tokens)), vocab_(vocab.begin(), vocab.end()) {}

    Formula parse_all() {
        Formula f = quantified();
        expect(Token::Kind::End, "unexpected trailing input");
        return f;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& advance() { return toks_[pos_++]; }
    bool match(Token::Kind k) {
        if (peek().kind != k) return false;
        ++pos_;
        return true;
    }
    void expect(Token::Kind k, const char* what) {
        if (!match(k)) fail(Diagnostic::Kind::Syntax, peek().pos, what);
    }
    bool at_keyword(const char* kw) const {
        return peek().kind == Token::Kind::Ident && peek().text == kw;
    }

    Formula quantified() {
        if (!at_keyword("forall") && !at_keyword("exists")) return iff();
        std::vector<std::pair<bool, std::string>> binders;  // (is_forall, var)
        while (at_keyword("forall") || at_keyword("exists")) {
            const bool universal = peek().text == "forall";
            advance();
            if (peek().kind != Token::Kind::Ident)
                fail(Diagnostic::Kind::Syntax, peek().pos, "expected a variable name");
            const Token& var = advance();
            if (std::find(scope_.begin(), scope_.end(), var.text) != scope_.end())
                fail(Diagnostic::Kind::DuplicateBinder, var.pos,
                     "variable '" + var.text + "' is already bound");
            scope_.push_back(var.text);
            binders.emplace_back(universal, var.text);
        }
        expect(Token::Kind::Colon, "expected ':' after quantifier prefix");
        Formula body = quantified();
        for (auto it = binders.rbegin(); it != binders.rend(); ++it) {
            body = it->first ? Formula::forall(it->second, std::move(body))
                             : Formula::exists(it->second, std::move(body));
            scope_.pop_back();
        }
        return body;
    }

    Formula iff() {
        Formula lhs = impl();
        while (match(Token::Kind::Iff))
            lhs = Formula::binary(Connective::BiResidual, std::move(lhs), impl());
        return lhs;
    }

    Formula impl() {
        Formula lhs = disj();
        if (peek().kind == Token::Kind::FatArrow || peek().kind == Token::Kind::ThinArrow) {
            const Connective c = advance().kind == Token::Kind::FatArrow
                                     ? Connective::ResidualImpl
                                     : Connective::MaterialImpl;
            return Formula::binary(c, std::move(lhs), impl());
        }
        return lhs;
    }

    Formula disj() {
        Formula lhs = conj();
        while (peek().kind == Token::Kind::OPlus || peek().kind == Token::Kind::Pipe) {
            const Connective c = advance().kind == Token::Kind::OPlus
                                     ? Connective::StrongDisj
                                     : Connective::WeakDisj;
            lhs = Formula::binary(c, std::move(lhs), conj());
        }
        return lhs;
    }

    Formula conj() {
        Formula lhs = neg();
        while (peek().kind == Token::Kind::Star || peek().kind == Token::Kind::Amp) {
            const Connective c = advance().kind == Token::Kind::Star
                                     ? Connective::StrongConj
                                     : Connective::WeakConj;
            lhs = Formula::binary(c, std::move(lhs), neg());
        }
        return lhs;
    }

    Formula neg() {
        if (peek().kind == Token::Kind::Tilde || peek().kind == Token::Kind::Bang) {
            const Connective c = advance().kind == Token::Kind::Tilde
                                     ? Connective::ResidualNeg
                                     : Connective::StrongNeg;
            return Formula::unary(c, neg());
        }
        return primary();
    }

    Formula primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Token::Kind::Number: {
                advance();
                if (!(t.number >= 0.0 && t.number <= 1.0))
                    fail(Diagnostic::Kind::Syntax, t.pos,
                         "constant truth degree must lie in [0, 1]");
                return Formula::constant(t.number);
            }
            case Token::Kind::LParen: {
                advance();
                Formula f = quantified();
                expect(Token::Kind::RParen, "expected ')'");
                return f;
            }
            case Token::Kind::Ident: {
                if (t.text == "forall" || t.text == "exists")
                    fail(Diagnostic::Kind::Syntax, t.pos,
                         "quantifier must start a formula or a parenthesized group");
                advance();
                expect(Token::Kind::LParen, "expected '(' after predicate name");
                if (peek().kind != Token::Kind::Ident)
                    fail(Diagnostic::Kind::Syntax, peek().pos, "expected a variable name");
                const Token var = advance();
                expect(Token::Kind::RParen, "expected ')' after variable");
                if (std::find(scope_.begin(), scope_.end(), var.text) == scope_.end())
                    fail(Diagnostic::Kind::UnboundVariable, var.pos,
                         "variable '" + var.text + "' is not bound");
                if (t.text == answer_predicate()) return Formula::answer(var.text);
                if (!vocab_.count(t.text))
                    fail(Diagnostic::Kind::UnknownPredicate, t.pos,
                         "unknown predicate '" + t.text + "'");
                return Formula::task(t.text, var.text);
            }
            default:
                fail(Diagnostic::Kind::Syntax, t.pos, "expected a formula");
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::unordered_set<std::string> vocab_;
    std::vector<std::string> scope_;
};

}  // namespace detail

/// Parses one formula. `vocab` lists the valid predicate names; the answer
/// predicate "ans" is always allowed and must not appear in `vocab`.
inline ParseResult<Formula> parse_formula(std::string_view text,
                                          const std::vector<std::string>& vocab) {
    try {
        detail::FormulaParser p(detail::lex(text, 0), vocab);
        return p.parse_all();
    } catch (const detail::Abort& a) {
        return a.diag;
    }
}

/// Parses a rule file (see the header comment for the line grammar).
inline ParseResult<KnowledgeBase> parse_kb(std::string_view text,
                                           const std::vector<std::string>& vocab) {
    KnowledgeBase kb;
    kb.vocab = vocab;
    std::unordered_set<std::string> names;
    std::size_t line_start = 0;
    while (line_start <= text.size()) {
        std::size_t eol = text.find('\n', line_start);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(line_start, eol - line_start);
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos || line[first] == '#') {
            line_start = eol + 1;
            continue;
        }
        try {
            std::vector<detail::Token> toks = detail::lex(line, line_start);
            std::size_t i = 0;
            auto expect_kind = [&](detail::Token::Kind k, const char* what) {
                if (toks[i].kind != k)
                    detail::fail(Diagnostic::Kind::Syntax, toks[i].pos, what);
                return toks[i++];
            };
            const detail::Token head =
                expect_kind(detail::Token::Kind::Ident, "expected 'rule'");
            if (head.text != "rule")
                detail::fail(Diagnostic::Kind::Syntax, head.pos, "expected 'rule'");
            const detail::Token name =
                expect_kind(detail::Token::Kind::String, "expected a quoted rule name");
            double weight = 1.0;
            if (toks[i].kind == detail::Token::Kind::Ident && toks[i].text == "weight") {
                ++i;
                const detail::Token w =
                    expect_kind(detail::Token::Kind::Number, "expected a weight value");
                if (!(w.number >= 0.0))
                    detail::fail(Diagnostic::Kind::InvalidWeight, w.pos,
                                 "weight must be finite and non-negative");
                weight = w.number;
            }
            expect_kind(detail::Token::Kind::Colon, "expected ':' after rule header");
            if (name.text.empty())
                detail::fail(Diagnostic::Kind::Syntax, name.pos, "empty rule name");
            if (!names.insert(name.text).second)
                detail::fail(Diagnostic::Kind::DuplicateRuleName, name.pos,
                             "duplicate rule name '" + name.text + "'");
            std::vector<detail::Token> rest(toks.begin() + static_cast<long>(i),
                                            toks.end());
            detail::FormulaParser p(std::move(rest), vocab);
            kb.rules.push_back(Rule{name.text, weight, p.parse_all()});
        } catch (const detail::Abort& a) {
            return a.diag;
        }
        line_start = eol + 1;
    }
    return kb;
}

}  // namespace logicloss::fol
