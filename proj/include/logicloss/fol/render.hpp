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

// Text form with minimal parentheses. render() is the inverse of
// parse_formula(): parse(render(f)) == f structurally, and rendering a parsed
// formula reproduces the canonical spelling.

#include <string>

#include "logicloss/detail/numfmt.hpp"
#include "logicloss/fol/formula.hpp"

namespace logicloss::fol {

namespace detail {

// Looser binds lower. Parenthesization compares a child's level against its
// context; associativity decides whether equal levels need parentheses.
inline int precedence_of(const Formula& f) {
    switch (f.kind()) {
        case NodeKind::TaskAtom:
        case NodeKind::AnswerAtom:
        case NodeKind::ConstAtom:
            return 6;
        case NodeKind::Unary:
            return 5;
        case NodeKind::Binary:
            switch (f.connective()) {
                case Connective::StrongConj:
                case Connective::WeakConj:
                    return 4;
                case Connective::StrongDisj:
                case Connective::WeakDisj:
                    return 3;
                case Connective::ResidualImpl:
                case Connective::MaterialImpl:
                    return 2;
                case Connective::BiResidual:
                    return 1;
                default:
                    return 6;
            }
        case NodeKind::ForAll:
        case NodeKind::Exists:
            return 0;
    }
    return 6;
}

inline void render_into(const Formula& f, std::string& out) {
    auto child = [&](const Formula& c, bool parens) {
        if (parens) out.push_back('(');
        render_into(c, out);
        if (parens) out.push_back(')');
    };
    switch (f.kind()) {
        case NodeKind::TaskAtom:
            out += f.predicate();
            out.push_back('(');
            out += f.variable();
            out.push_back(')');
            return;
        case NodeKind::AnswerAtom:
            out += answer_predicate();
            out.push_back('(');
            out += f.variable();
            out.push_back(')');
            return;
        case NodeKind::ConstAtom:
            out += logicloss::detail::format_double(f.value());
            return;
        case NodeKind::Unary: {
            out += connective_token(f.connective());
            const Formula b = f.body();
            child(b, precedence_of(b) < 5);
            return;
        }
        case NodeKind::Binary: {
            const int p = precedence_of(f);
            const bool right_assoc = p == 2;
            const Formula l = f.lhs();
            const Formula r = f.rhs();
            const int lp = precedence_of(l);
            const int rp = precedence_of(r);
            child(l, right_assoc ? lp <= p : lp < p);
            out.push_back(' ');
            out += connective_token(f.connective());
            out.push_back(' ');
            child(r, right_assoc ? rp < p : rp <= p);
            return;
        }
        case NodeKind::ForAll:
        case NodeKind::Exists: {
            Formula cur = f;
            while (cur.kind() == NodeKind::ForAll || cur.kind() == NodeKind::Exists) {
                out += cur.kind() == NodeKind::ForAll ? "forall " : "exists ";
                out += cur.variable();
                out.push_back(' ');
                cur = cur.body();
            }
            out += ": ";
            render_into(cur, out);  // quantifier body extends to the end
            return;
        }
    }
}

}  // namespace detail

inline std::string render(const Formula& f) {
    std::string out;
    detail::render_into(f, out);
    return out;
}

inline std::string render(const Rule& r) {
    std::string out = "rule \"" + r.name + "\"";
    if (r.weight != 1.0) out += " weight " + logicloss::detail::format_double(r.weight);
    out += ": ";
    out += render(r.formula);
    return out;
}

}  // namespace logicloss::fol
