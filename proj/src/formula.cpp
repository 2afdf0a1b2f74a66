#include "etrnn/formula.hpp"

#include <set>

#include "etrnn/error.hpp"

namespace etrnn {

Term mk_var(std::string name) { return std::make_shared<TermNode>(TermNode{TVar{std::move(name)}}); }

Term mk_const(Rational value) { return std::make_shared<TermNode>(TermNode{TConst{std::move(value)}}); }

Term mk_add(Term lhs, Term rhs) {
    return std::make_shared<TermNode>(TermNode{TAdd{std::move(lhs), std::move(rhs)}});
}

Term mk_mul(Term lhs, Term rhs) {
    return std::make_shared<TermNode>(TermNode{TMul{std::move(lhs), std::move(rhs)}});
}

Term mk_neg(Term arg) {
    if (auto* c = std::get_if<TConst>(&arg->v)) return mk_const(-c->value);
    return std::make_shared<TermNode>(TermNode{TNeg{std::move(arg)}});
}

Term mk_div(Term num, Term den) {
    auto* cn = std::get_if<TConst>(&num->v);
    auto* cd = std::get_if<TConst>(&den->v);
    if (cn && cd) {
        if (cd->value == 0) throw Error(Errc::domain, "division by the constant zero");
        return mk_const(cn->value / cd->value);
    }
    return std::make_shared<TermNode>(TermNode{TDiv{std::move(num), std::move(den)}});
}

Term mk_apply(std::string fn, Term arg) {
    return std::make_shared<TermNode>(TermNode{TApply{std::move(fn), std::move(arg)}});
}

Term mk_sub(Term lhs, Term rhs) { return mk_add(std::move(lhs), mk_neg(std::move(rhs))); }

bool term_equal(const Term& a, const Term& b) {
    if (a == b) return true;
    if (a->v.index() != b->v.index()) return false;
    return std::visit(
        [&](const auto& na) {
            using T = std::decay_t<decltype(na)>;
            const auto& nb = std::get<T>(b->v);
            if constexpr (std::is_same_v<T, TVar>) return na.name == nb.name;
            else if constexpr (std::is_same_v<T, TConst>) return na.value == nb.value;
            else if constexpr (std::is_same_v<T, TAdd>)
                return term_equal(na.lhs, nb.lhs) && term_equal(na.rhs, nb.rhs);
            else if constexpr (std::is_same_v<T, TMul>)
                return term_equal(na.lhs, nb.lhs) && term_equal(na.rhs, nb.rhs);
            else if constexpr (std::is_same_v<T, TNeg>) return term_equal(na.arg, nb.arg);
            else if constexpr (std::is_same_v<T, TDiv>)
                return term_equal(na.num, nb.num) && term_equal(na.den, nb.den);
            else return na.fn == nb.fn && term_equal(na.arg, nb.arg);
        },
        a->v);
}

namespace {

void term_vars(const Term& t, std::vector<std::string>& out, std::set<std::string>& seen,
               const std::set<std::string>& bound) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, TVar>) {
                if (!bound.count(n.name) && seen.insert(n.name).second) out.push_back(n.name);
            } else if constexpr (std::is_same_v<T, TAdd>) {
                term_vars(n.lhs, out, seen, bound);
                term_vars(n.rhs, out, seen, bound);
            } else if constexpr (std::is_same_v<T, TMul>) {
                term_vars(n.lhs, out, seen, bound);
                term_vars(n.rhs, out, seen, bound);
            } else if constexpr (std::is_same_v<T, TNeg>) {
                term_vars(n.arg, out, seen, bound);
            } else if constexpr (std::is_same_v<T, TDiv>) {
                term_vars(n.num, out, seen, bound);
                term_vars(n.den, out, seen, bound);
            } else if constexpr (std::is_same_v<T, TApply>) {
                term_vars(n.arg, out, seen, bound);
            }
        },
        t->v);
}

void formula_vars(const Formula& f, std::vector<std::string>& out, std::set<std::string>& seen,
                  std::set<std::string> bound) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, FLt> || std::is_same_v<T, FEq>) {
                term_vars(n.lhs, out, seen, bound);
                term_vars(n.rhs, out, seen, bound);
            } else if constexpr (std::is_same_v<T, FAnd> || std::is_same_v<T, FOr>) {
                formula_vars(n.lhs, out, seen, bound);
                formula_vars(n.rhs, out, seen, bound);
            } else if constexpr (std::is_same_v<T, FNot>) {
                formula_vars(n.arg, out, seen, bound);
            } else {
                bound.insert(n.var);
                formula_vars(n.body, out, seen, std::move(bound));
            }
        },
        f->v);
}

void bound_vars(const Formula& f, std::vector<std::string>& out, std::set<std::string>& seen) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, FAnd> || std::is_same_v<T, FOr>) {
                bound_vars(n.lhs, out, seen);
                bound_vars(n.rhs, out, seen);
            } else if constexpr (std::is_same_v<T, FNot>) {
                bound_vars(n.arg, out, seen);
            } else if constexpr (std::is_same_v<T, FExists>) {
                if (seen.insert(n.var).second) out.push_back(n.var);
                bound_vars(n.body, out, seen);
            }
        },
        f->v);
}

} // namespace

Formula mk_lt(Term lhs, Term rhs) {
    return std::make_shared<FormulaNode>(FormulaNode{FLt{std::move(lhs), std::move(rhs)}});
}

Formula mk_eq(Term lhs, Term rhs) {
    return std::make_shared<FormulaNode>(FormulaNode{FEq{std::move(lhs), std::move(rhs)}});
}

Formula mk_and(Formula lhs, Formula rhs) {
    return std::make_shared<FormulaNode>(FormulaNode{FAnd{std::move(lhs), std::move(rhs)}});
}

Formula mk_or(Formula lhs, Formula rhs) {
    return std::make_shared<FormulaNode>(FormulaNode{FOr{std::move(lhs), std::move(rhs)}});
}

Formula mk_not(Formula arg) { return std::make_shared<FormulaNode>(FormulaNode{FNot{std::move(arg)}}); }

Formula mk_exists(std::string var, Formula body) {
    return std::make_shared<FormulaNode>(FormulaNode{FExists{std::move(var), std::move(body)}});
}

bool formula_equal(const Formula& a, const Formula& b) {
    if (a == b) return true;
    if (a->v.index() != b->v.index()) return false;
    return std::visit(
        [&](const auto& na) {
            using T = std::decay_t<decltype(na)>;
            const auto& nb = std::get<T>(b->v);
            if constexpr (std::is_same_v<T, FLt> || std::is_same_v<T, FEq>)
                return term_equal(na.lhs, nb.lhs) && term_equal(na.rhs, nb.rhs);
            else if constexpr (std::is_same_v<T, FAnd> || std::is_same_v<T, FOr>)
                return formula_equal(na.lhs, nb.lhs) && formula_equal(na.rhs, nb.rhs);
            else if constexpr (std::is_same_v<T, FNot>)
                return formula_equal(na.arg, nb.arg);
            else
                return na.var == nb.var && formula_equal(na.body, nb.body);
        },
        a->v);
}

std::vector<std::string> free_variables(const Term& t) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    term_vars(t, out, seen, {});
    return out;
}

std::vector<std::string> free_variables(const Formula& f) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    formula_vars(f, out, seen, {});
    return out;
}

std::vector<std::string> bound_variables(const Formula& f) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    bound_vars(f, out, seen);
    return out;
}

namespace {

Formula negate(const Formula& f);

Formula desugar(const Formula& f) {
    return std::visit(
        [&](const auto& n) -> Formula {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, FLt> || std::is_same_v<T, FEq>) return f;
            else if constexpr (std::is_same_v<T, FAnd>) return mk_and(desugar(n.lhs), desugar(n.rhs));
            else if constexpr (std::is_same_v<T, FOr>) return mk_or(desugar(n.lhs), desugar(n.rhs));
            else if constexpr (std::is_same_v<T, FNot>) return negate(n.arg);
            else return mk_exists(n.var, desugar(n.body));
        },
        f->v);
}

Formula negate(const Formula& f) {
    return std::visit(
        [&](const auto& n) -> Formula {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, FLt>)
                return mk_or(mk_lt(n.rhs, n.lhs), mk_eq(n.lhs, n.rhs));
            else if constexpr (std::is_same_v<T, FEq>)
                return mk_or(mk_lt(n.lhs, n.rhs), mk_lt(n.rhs, n.lhs));
            else if constexpr (std::is_same_v<T, FAnd>)
                return mk_or(negate(n.lhs), negate(n.rhs));
            else if constexpr (std::is_same_v<T, FOr>)
                return mk_and(negate(n.lhs), negate(n.rhs));
            else if constexpr (std::is_same_v<T, FNot>)
                return desugar(n.arg);
            else
                throw Error(Errc::unsupported,
                            "negated existential quantifier is outside the supported fragment");
        },
        f->v);
}

} // namespace

Formula desugar_negation(const Formula& f) { return desugar(f); }

bool is_strict_fragment(const Formula& f) {
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, FLt>) return true;
            else if constexpr (std::is_same_v<T, FEq>) return false;
            else if constexpr (std::is_same_v<T, FAnd> || std::is_same_v<T, FOr>)
                return is_strict_fragment(n.lhs) && is_strict_fragment(n.rhs);
            else if constexpr (std::is_same_v<T, FNot>) return false;
            else return is_strict_fragment(n.body);
        },
        f->v);
}

// Rendering uses minimal parentheses driven by binding strength. Binary
// operators are left associative, so a right child at the same level is
// parenthesized to keep re-parsing shape faithful. exists has the lowest
// strength and extends as far right as possible.
namespace {

constexpr int kPrecExists = 0;
constexpr int kPrecOr = 1;
constexpr int kPrecAnd = 2;
constexpr int kPrecCmp = 3;
constexpr int kPrecSum = 4;
constexpr int kPrecProd = 5;
constexpr int kPrecUnary = 6;
constexpr int kPrecAtom = 7;

void render_term_at(const Term& t, int min_prec, std::string& out);

void wrap(bool need, const std::function<void(std::string&)>& body, std::string& out) {
    if (need) out += "(";
    body(out);
    if (need) out += ")";
}

void render_term_at(const Term& t, int min_prec, std::string& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, TVar>) {
                out += n.name;
            } else if constexpr (std::is_same_v<T, TConst>) {
                if (n.value < 0) {
                    wrap(min_prec > kPrecUnary,
                         [&](std::string& o) { o += "-" + rat_to_string(-n.value); }, out);
                } else {
                    out += rat_to_string(n.value);
                }
            } else if constexpr (std::is_same_v<T, TAdd>) {
                wrap(min_prec > kPrecSum,
                     [&](std::string& o) {
                         render_term_at(n.lhs, kPrecSum, o);
                         // Prefer subtraction syntax for a negated or
                         // negative-constant right operand.
                         if (auto* neg = std::get_if<TNeg>(&n.rhs->v)) {
                             o += " - ";
                             render_term_at(neg->arg, kPrecSum + 1, o);
                             return;
                         }
                         if (auto* c = std::get_if<TConst>(&n.rhs->v); c && c->value < 0) {
                             o += " - " + rat_to_string(-c->value);
                             return;
                         }
                         o += " + ";
                         render_term_at(n.rhs, kPrecSum + 1, o);
                     },
                     out);
            } else if constexpr (std::is_same_v<T, TMul>) {
                wrap(min_prec > kPrecProd,
                     [&](std::string& o) {
                         render_term_at(n.lhs, kPrecProd, o);
                         o += " * ";
                         render_term_at(n.rhs, kPrecProd + 1, o);
                     },
                     out);
            } else if constexpr (std::is_same_v<T, TNeg>) {
                wrap(min_prec > kPrecUnary,
                     [&](std::string& o) {
                         o += "-";
                         render_term_at(n.arg, kPrecUnary, o);
                     },
                     out);
            } else if constexpr (std::is_same_v<T, TDiv>) {
                wrap(min_prec > kPrecProd,
                     [&](std::string& o) {
                         render_term_at(n.num, kPrecProd, o);
                         o += " / ";
                         render_term_at(n.den, kPrecProd + 1, o);
                     },
                     out);
            } else {
                out += n.fn + "(";
                render_term_at(n.arg, kPrecExists, out);
                out += ")";
            }
        },
        t->v);
}

void render_formula_at(const Formula& f, int min_prec, std::string& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, FLt>) {
                wrap(min_prec > kPrecCmp,
                     [&](std::string& o) {
                         render_term_at(n.lhs, kPrecSum, o);
                         o += " < ";
                         render_term_at(n.rhs, kPrecSum, o);
                     },
                     out);
            } else if constexpr (std::is_same_v<T, FEq>) {
                wrap(min_prec > kPrecCmp,
                     [&](std::string& o) {
                         render_term_at(n.lhs, kPrecSum, o);
                         o += " = ";
                         render_term_at(n.rhs, kPrecSum, o);
                     },
                     out);
            } else if constexpr (std::is_same_v<T, FAnd>) {
                wrap(min_prec > kPrecAnd,
                     [&](std::string& o) {
                         render_formula_at(n.lhs, kPrecAnd, o);
                         o += " & ";
                         render_formula_at(n.rhs, kPrecAnd + 1, o);
                     },
                     out);
            } else if constexpr (std::is_same_v<T, FOr>) {
                wrap(min_prec > kPrecOr,
                     [&](std::string& o) {
                         render_formula_at(n.lhs, kPrecOr, o);
                         o += " | ";
                         render_formula_at(n.rhs, kPrecOr + 1, o);
                     },
                     out);
            } else if constexpr (std::is_same_v<T, FNot>) {
                throw Error(Errc::unsupported, "negation has no concrete syntax; desugar first");
            } else {
                wrap(min_prec > kPrecExists,
                     [&](std::string& o) {
                         o += "exists " + n.var + " ";
                         render_formula_at(n.body, kPrecExists, o);
                     },
                     out);
            }
        },
        f->v);
}

} // namespace

std::string render(const Term& t) {
    std::string out;
    render_term_at(t, kPrecExists, out);
    return out;
}

std::string render(const Formula& f) {
    std::string out;
    render_formula_at(f, kPrecExists, out);
    return out;
}

} // namespace etrnn
