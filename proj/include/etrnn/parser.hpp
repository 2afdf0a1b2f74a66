#pragma once

// Text parser for formulas and terms. Syntax errors carry line and column;
// function symbols are checked against the signature during parsing.
//
// Grammar, loosest first:
//   entity := 'exists' IDENT entity | disj
//   disj   := conj ('|' conj)*
//   conj   := cmp ('&' cmp)*
//   cmp    := sum (('<' | '=') sum)?
//   sum    := prod (('+' | '-') prod)*
//   prod   := unary (('*' | '/') unary)*
//   unary  := '-' unary | atom
//   atom   := NUMBER | IDENT | IDENT '(' entity ')' | '(' entity ')'
// A parenthesized entity may be a formula or a term; each operator insists
// on the operand kind it needs.

#include <string_view>

#include "etrnn/activation.hpp"
#include "etrnn/formula.hpp"

namespace etrnn {

Formula parse_formula(std::string_view text, const Signature& sig);
Term parse_term(std::string_view text, const Signature& sig);

} // namespace etrnn
