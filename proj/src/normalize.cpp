#include "etrnn/normalize.hpp"

#include <map>
#include <optional>
#include <set>

#include "etrnn/log.hpp"

namespace etrnn {

namespace {

// Shared shape for the two atom-local rewrites: process terms bottom-up,
// collect (fresh var, pinned equality, defining term) triples, then wrap
// the rewritten atom as  exists v1 .. vk (atom' & eq1 & ... & eqk).
struct PinnedVar {
    std::string var;
    Formula equality;
    Term definition;
};

Formula wrap_atom(Formula atom, const std::vector<PinnedVar>& pins) {
    for (const PinnedVar& p : pins) atom = mk_and(atom, p.equality);
    for (auto it = pins.rbegin(); it != pins.rend(); ++it) atom = mk_exists(it->var, atom);
    return atom;
}

// Children are rewritten left to right so fresh names and schedule order
// are stable regardless of how the compiler sequences call arguments.
template <class AtomRewriter>
Formula rewrite_atoms(const Formula& f, AtomRewriter& rw) {
    return std::visit(
        [&](const auto& n) -> Formula {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, FLt>) return rw.atom(n.lhs, n.rhs, true);
            else if constexpr (std::is_same_v<T, FEq>) return rw.atom(n.lhs, n.rhs, false);
            else if constexpr (std::is_same_v<T, FAnd>) {
                Formula l = rewrite_atoms(n.lhs, rw);
                Formula r = rewrite_atoms(n.rhs, rw);
                return mk_and(std::move(l), std::move(r));
            } else if constexpr (std::is_same_v<T, FOr>) {
                Formula l = rewrite_atoms(n.lhs, rw);
                Formula r = rewrite_atoms(n.rhs, rw);
                return mk_or(std::move(l), std::move(r));
            } else if constexpr (std::is_same_v<T, FNot>) {
                return mk_not(rewrite_atoms(n.arg, rw));
            } else {
                return mk_exists(n.var, rewrite_atoms(n.body, rw));
            }
        },
        f->v);
}

struct Flattener {
    const Signature& sig;
    FreshGen gen;
    WitnessExtension sched;
    int atom_index = 0;

    Term term(const Term& t, std::vector<PinnedVar>& pins) {
        return std::visit(
            [&](const auto& n) -> Term {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, TVar> || std::is_same_v<T, TConst>) {
                    return t;
                } else if constexpr (std::is_same_v<T, TAdd>) {
                    Term l = term(n.lhs, pins), r = term(n.rhs, pins);
                    return mk_add(std::move(l), std::move(r));
                } else if constexpr (std::is_same_v<T, TMul>) {
                    Term l = term(n.lhs, pins), r = term(n.rhs, pins);
                    return mk_mul(std::move(l), std::move(r));
                } else if constexpr (std::is_same_v<T, TNeg>) {
                    return mk_neg(term(n.arg, pins));
                } else if constexpr (std::is_same_v<T, TDiv>) {
                    Term num = term(n.num, pins), den = term(n.den, pins);
                    return mk_div(std::move(num), std::move(den));
                } else {
                    sig.find(n.fn);
                    Term arg = term(n.arg, pins);
                    std::string y = gen.next("arg");
                    pins.push_back({y, mk_eq(mk_var(y), arg), arg});
                    return mk_apply(n.fn, mk_var(y));
                }
            },
            t->v);
    }

    Formula atom(const Term& lhs, const Term& rhs, bool is_lt) {
        gen.set_salt(atom_index++);
        std::vector<PinnedVar> pins;
        Term l = term(lhs, pins), r = term(rhs, pins);
        for (const PinnedVar& p : pins) sched.entries.push_back({p.var, SchedOp::term, p.definition});
        return wrap_atom(is_lt ? mk_lt(l, r) : mk_eq(l, r), pins);
    }
};

struct MinusDivEliminator {
    FreshGen gen;
    WitnessExtension sched;
    int atom_index = 0;

    Term term(const Term& t, std::vector<PinnedVar>& pins) {
        return std::visit(
            [&](const auto& n) -> Term {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, TVar> || std::is_same_v<T, TConst>) {
                    return t;
                } else if constexpr (std::is_same_v<T, TAdd>) {
                    Term l = term(n.lhs, pins), r = term(n.rhs, pins);
                    return mk_add(std::move(l), std::move(r));
                } else if constexpr (std::is_same_v<T, TMul>) {
                    Term l = term(n.lhs, pins), r = term(n.rhs, pins);
                    return mk_mul(std::move(l), std::move(r));
                } else if constexpr (std::is_same_v<T, TApply>) {
                    return mk_apply(n.fn, term(n.arg, pins));
                } else if constexpr (std::is_same_v<T, TNeg>) {
                    Term arg = term(n.arg, pins);
                    Term folded = mk_neg(arg);
                    if (std::holds_alternative<TConst>(folded->v)) return folded;
                    std::string x = gen.next("neg");
                    pins.push_back({x, mk_eq(mk_add(mk_var(x), arg), mk_const(Rational(0))),
                                    mk_neg(arg)});
                    return mk_var(x);
                } else {
                    Term num = term(n.num, pins), den = term(n.den, pins);
                    Term folded = mk_div(num, den);
                    if (std::holds_alternative<TConst>(folded->v)) return folded;
                    std::string x = gen.next("quo");
                    pins.push_back({x, mk_eq(mk_mul(mk_var(x), den), num), mk_div(num, den)});
                    return mk_var(x);
                }
            },
            t->v);
    }

    Formula atom(const Term& lhs, const Term& rhs, bool is_lt) {
        gen.set_salt(atom_index++);
        std::vector<PinnedVar> pins;
        Term l = term(lhs, pins), r = term(rhs, pins);
        for (const PinnedVar& p : pins) sched.entries.push_back({p.var, SchedOp::term, p.definition});
        return wrap_atom(is_lt ? mk_lt(l, r) : mk_eq(l, r), pins);
    }
};

void collect_binder_clashes(const Formula& f, std::set<std::string>& binders,
                            const std::set<std::string>& free) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, FAnd> || std::is_same_v<T, FOr>) {
                collect_binder_clashes(n.lhs, binders, free);
                collect_binder_clashes(n.rhs, binders, free);
            } else if constexpr (std::is_same_v<T, FNot>) {
                collect_binder_clashes(n.arg, binders, free);
            } else if constexpr (std::is_same_v<T, FExists>) {
                if (!binders.insert(n.var).second)
                    throw Error(Errc::unsupported,
                                "duplicate bound variable '" + n.var + "'; rename binders apart");
                if (free.count(n.var))
                    throw Error(Errc::unsupported, "bound variable '" + n.var +
                                                       "' shadows a free variable; rename it");
                collect_binder_clashes(n.body, binders, free);
            }
        },
        f->v);
}

} // namespace

void validate_binder_hygiene(const Formula& f) {
    std::set<std::string> binders;
    auto fv = free_variables(f);
    std::set<std::string> free(fv.begin(), fv.end());
    collect_binder_clashes(f, binders, free);
}

namespace {

// Builds the equational system. Every derived value gets a fresh variable,
// one defining schedule entry, and constraints forcing it. Squares come
// from the inversion identity
//     1/(A) - 1/(A+1) = 1/(A^2 + A)   with A = w + 1,
// so A^2 = g - A with g the inverse of that difference, giving
//     w^2 = g - A - 2w - 1
// by expanding (w+1)^2. The gadget needs A, A+1 and the difference to be
// invertible, which holds whenever w is not -1 or -2; callers only square
// values that are nonnegative under the intended witness.
class EqBuilder {
public:
    EqBuilder(const Signature& sig) : sig_(sig) {}

    EqSystem take() && { return std::move(sys_); }

    void set_prov(std::string p) { prov_ = std::move(p); }
    void set_salt(int s) { gen_.set_salt(s); }

    void declare(const std::string& v) {
        if (declared_.insert(v).second) sys_.variables.push_back(v);
    }

    std::string fresh(const std::string& tag) {
        std::string v = gen_.next(tag);
        declare(v);
        return v;
    }

    void sched(const std::string& var, SchedOp op, Term expr) {
        sys_.schedule.entries.push_back({var, op, std::move(expr)});
    }

    void emit_unit(const std::string& x) { emit({EqConstraint::Kind::unit, x, "", "", ""}); }
    void emit_add(const std::string& x, const std::string& y, const std::string& z) {
        emit({EqConstraint::Kind::add, x, y, z, ""});
    }
    void emit_invmul(const std::string& x, const std::string& y) {
        emit({EqConstraint::Kind::invmul, x, y, "", ""});
    }
    void emit_fun(const std::string& x, const std::string& fn, const std::string& y) {
        emit({EqConstraint::Kind::fun, x, y, "", fn});
    }

    std::string one() {
        if (!one_) {
            one_ = "$one";
            declare(*one_);
            sched(*one_, SchedOp::term, mk_const(Rational(1)));
            emit_unit(*one_);
        }
        return *one_;
    }

    std::string zero() {
        if (!zero_) {
            zero_ = "$zero";
            declare(*zero_);
            sched(*zero_, SchedOp::term, mk_const(Rational(0)));
            emit_add(*zero_, *zero_, *zero_);
        }
        return *zero_;
    }

    std::string add(const std::string& u, const std::string& v) {
        std::string w = fresh("t");
        sched(w, SchedOp::term, mk_add(mk_var(u), mk_var(v)));
        emit_add(u, v, w);
        return w;
    }

    std::string sub(const std::string& u, const std::string& v) {
        std::string w = fresh("t");
        sched(w, SchedOp::term, mk_sub(mk_var(u), mk_var(v)));
        emit_add(w, v, u);
        return w;
    }

    std::string neg(const std::string& u) {
        std::string w = fresh("t");
        sched(w, SchedOp::term, mk_neg(mk_var(u)));
        emit_add(w, u, zero());
        return w;
    }

    void tie(const std::string& u, const std::string& v) { emit_add(u, zero(), v); }

    std::string inv_pair(const std::string& u) {
        std::string w = fresh("i");
        sched(w, SchedOp::term, mk_div(mk_const(Rational(1)), mk_var(u)));
        emit_invmul(u, w);
        return w;
    }

    // n >= 1 copies of base by doubling.
    std::string int_chain_on(const BigInt& n, const std::string& base) {
        if (n == 1) return base;
        std::string acc = base;
        long top = static_cast<long>(boost::multiprecision::msb(n));
        for (long i = top - 1; i >= 0; --i) {
            acc = add(acc, acc);
            if (boost::multiprecision::bit_test(n, static_cast<unsigned>(i))) acc = add(acc, base);
        }
        return acc;
    }

    std::string const_rat(const Rational& c) {
        if (auto it = consts_.find(c); it != consts_.end()) return it->second;
        std::string v;
        if (c == 0) v = zero();
        else if (c == 1) v = one();
        else if (c < 0) v = neg(const_rat(-c));
        else if (rat_den(c) == 1) v = int_chain_on(rat_num(c), one());
        else {
            // Fresh v with q*v tied to the integer chain of p forces v = p/q.
            v = fresh("c");
            sched(v, SchedOp::term, mk_const(c));
            std::string qv = int_chain_on(rat_den(c), v);
            tie(qv, const_rat(Rational(rat_num(c))));
        }
        consts_[c] = v;
        return v;
    }

    std::string scalar_mul(const Rational& c, const std::string& u) {
        if (c == 0) return zero();
        if (c == 1) return u;
        if (c < 0) return neg(scalar_mul(-c, u));
        std::string pu = int_chain_on(rat_num(c), u);
        if (rat_den(c) == 1) return pu;
        std::string w = fresh("k");
        sched(w, SchedOp::term, mk_mul(mk_const(c), mk_var(u)));
        std::string qw = int_chain_on(rat_den(c), w);
        tie(qw, pu);
        return w;
    }

    std::string square_via_inversion(const std::string& w) {
        std::string A = add(w, one());
        std::string a = inv_pair(A);
        std::string B = add(A, one());
        std::string b = inv_pair(B);
        std::string e = sub(a, b);
        std::string g = inv_pair(e);
        std::string t1 = sub(g, A);
        std::string t2 = add(w, w);
        std::string t3 = sub(t1, t2);
        return sub(t3, one());
    }

    // Total squaring: v is |u| under the intended witness, and the three
    // auxiliary squares force (v-u)(v+u) = 0, so v^2 = u^2 always.
    std::string square_total(const std::string& u) {
        std::string v = fresh("v");
        sched(v, SchedOp::term, mk_apply("abs", mk_var(u)));
        std::string x = sub(v, u);
        std::string y = add(v, u);
        std::string sx = square_via_inversion(x);
        std::string sy = square_via_inversion(y);
        std::string sxy = square_via_inversion(add(x, y));
        tie(sxy, add(sx, sy));
        return square_via_inversion(v);
    }

    // Polarization: 2uv = (u+v)^2 - u^2 - v^2.
    std::string mul_total(const std::string& u, const std::string& v) {
        std::string s1 = square_total(add(u, v));
        std::string s2 = square_total(u);
        std::string s3 = square_total(v);
        std::string num = sub(sub(s1, s2), s3);
        std::string w = fresh("m");
        sched(w, SchedOp::term, mk_mul(mk_var(u), mk_var(v)));
        tie(add(w, w), num);
        return w;
    }

    std::string trans_term(const Term& t) {
        return std::visit(
            [&](const auto& n) -> std::string {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, TVar>) {
                    declare(n.name);
                    return n.name;
                } else if constexpr (std::is_same_v<T, TConst>) {
                    return const_rat(n.value);
                } else if constexpr (std::is_same_v<T, TAdd>) {
                    std::string l = trans_term(n.lhs), r = trans_term(n.rhs);
                    return add(l, r);
                } else if constexpr (std::is_same_v<T, TNeg>) {
                    return neg(trans_term(n.arg));
                } else if constexpr (std::is_same_v<T, TDiv>) {
                    throw Error(Errc::unsupported, "division reached the equational pass; run "
                                                   "minus/div elimination first");
                } else if constexpr (std::is_same_v<T, TMul>) {
                    if (auto* c = std::get_if<TConst>(&n.lhs->v))
                        return scalar_mul(c->value, trans_term(n.rhs));
                    if (auto* c = std::get_if<TConst>(&n.rhs->v))
                        return scalar_mul(c->value, trans_term(n.lhs));
                    if (term_equal(n.lhs, n.rhs)) return square_total(trans_term(n.lhs));
                    std::string l = trans_term(n.lhs), r = trans_term(n.rhs);
                    return mul_total(l, r);
                } else {
                    sig_.find(n.fn);
                    std::string av = trans_term(n.arg);
                    std::string w = fresh("f");
                    sched(w, SchedOp::term, mk_apply(n.fn, mk_var(av)));
                    emit_fun(w, n.fn, av);
                    return w;
                }
            },
            t->v);
    }

    // a < b  becomes  a + s = b, s = w^2, s * u = 1.
    void atom_lt(const Term& a, const Term& b) {
        std::string ea = trans_term(a), eb = trans_term(b);
        std::string s = fresh("s");
        sched(s, SchedOp::term, mk_sub(mk_var(eb), mk_var(ea)));
        emit_add(ea, s, eb);
        std::string w = fresh("w");
        sched(w, SchedOp::sqrt_exact, mk_var(s));
        tie(square_via_inversion(w), s);
        std::string u = fresh("u");
        sched(u, SchedOp::term, mk_div(mk_const(Rational(1)), mk_var(s)));
        emit_invmul(s, u);
    }

    void atom_eq(const Term& a, const Term& b) {
        std::string ea = trans_term(a), eb = trans_term(b);
        tie(ea, eb);
    }

    // Value of a residual that is zero exactly when the subformula holds.
    // All auxiliaries here are total, so unsatisfied branches still have
    // well-defined values.
    std::string residual(const Formula& f) {
        return std::visit(
            [&](const auto& n) -> std::string {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, FEq>) {
                    return sub(trans_term(n.lhs), trans_term(n.rhs));
                } else if constexpr (std::is_same_v<T, FLt>) {
                    // d > 0 iff there are s = w^2 and u with s = d, s u = 1;
                    // the residual is (d - s)^2 + (s u - 1)^2.
                    std::string ea = trans_term(n.lhs), eb = trans_term(n.rhs);
                    std::string d = sub(eb, ea);
                    std::string w = fresh("w");
                    sched(w, SchedOp::sqrt_or_zero, mk_var(d));
                    std::string s = square_via_inversion(w);
                    std::string u = fresh("u");
                    sched(u, SchedOp::inv_or_zero, mk_var(s));
                    std::string q = sub(mul_total(s, u), one());
                    std::string p = sub(d, s);
                    return add(square_total(p), square_total(q));
                } else if constexpr (std::is_same_v<T, FAnd>) {
                    std::string l = square_total(residual(n.lhs));
                    std::string r = square_total(residual(n.rhs));
                    return add(l, r);
                } else if constexpr (std::is_same_v<T, FOr>) {
                    std::string l = residual(n.lhs), r = residual(n.rhs);
                    return mul_total(l, r);
                } else if constexpr (std::is_same_v<T, FExists>) {
                    declare(n.var);
                    return residual(n.body);
                } else {
                    throw Error(Errc::unsupported,
                                "negation reached the equational pass; desugar first");
                }
            },
            f->v);
    }

    void translate(const Formula& f) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, FAnd>) {
                    translate(n.lhs);
                    translate(n.rhs);
                } else if constexpr (std::is_same_v<T, FExists>) {
                    declare(n.var);
                    translate(n.body);
                } else if constexpr (std::is_same_v<T, FLt>) {
                    set_prov(render(f));
                    set_salt(salt_++);
                    atom_lt(n.lhs, n.rhs);
                } else if constexpr (std::is_same_v<T, FEq>) {
                    set_prov(render(f));
                    set_salt(salt_++);
                    atom_eq(n.lhs, n.rhs);
                } else if constexpr (std::is_same_v<T, FOr>) {
                    set_prov(render(f));
                    set_salt(salt_++);
                    tie(residual(f), zero());
                } else {
                    throw Error(Errc::unsupported,
                                "negation reached the equational pass; desugar first");
                }
            },
            f->v);
    }

private:
    void emit(EqConstraint c) {
        sys_.constraints.push_back(std::move(c));
        sys_.provenance.push_back(prov_);
    }

    const Signature& sig_;
    EqSystem sys_;
    FreshGen gen_;
    std::set<std::string> declared_;
    std::map<Rational, std::string> consts_;
    std::optional<std::string> one_, zero_;
    std::string prov_ = "constants";
    int salt_ = 0;
};

} // namespace

RewriteResult flatten_functions(const Formula& f, const Signature& sig) {
    Flattener fl{sig, {}, {}, 0};
    Formula out = rewrite_atoms(f, fl);
    return {out, std::move(fl.sched)};
}

RewriteResult eliminate_minus_div(const Formula& f) {
    MinusDivEliminator el;
    Formula out = rewrite_atoms(f, el);
    return {out, std::move(el.sched)};
}

EqSystem to_equational(const Formula& f, const Signature& sig) {
    validate_binder_hygiene(f);
    EqBuilder b(sig);
    b.translate(f);
    EqSystem sys = std::move(b).take();
    auto fv = free_variables(f);
    auto bv = bound_variables(f);
    sys.source_variables = fv;
    sys.source_variables.insert(sys.source_variables.end(), bv.begin(), bv.end());
    return sys;
}

ConstraintSystem to_invflat(const EqSystem& s) {
    ConstraintSystem out;
    out.variables = s.variables;
    out.source_variables = s.source_variables;
    out.schedule = s.schedule;
    std::set<std::string> declared(s.variables.begin(), s.variables.end());
    FreshGen gen;
    auto declare = [&](const std::string& v) {
        if (declared.insert(v).second) out.variables.push_back(v);
    };
    auto emit = [&](InvFlat c, const std::string& prov) {
        out.constraints.push_back(std::move(c));
        out.provenance.push_back(prov);
    };
    for (size_t i = 0; i < s.constraints.size(); ++i) {
        const EqConstraint& c = s.constraints[i];
        const std::string& prov = s.provenance[i];
        gen.set_salt(static_cast<int>(i));
        switch (c.kind) {
            case EqConstraint::Kind::unit:
                emit({InvFlat::Kind::unit, c.x, "", "", ""}, prov);
                break;
            case EqConstraint::Kind::add: {
                // x + y = z  becomes  v = 0, z + u + v = 0, x + y + u = 0.
                std::string v = gen.next("fz"), u = gen.next("fm");
                declare(v);
                declare(u);
                out.schedule.entries.push_back({v, SchedOp::term, mk_const(Rational(0))});
                out.schedule.entries.push_back(
                    {u, SchedOp::term, mk_neg(mk_add(mk_var(c.x), mk_var(c.y)))});
                emit({InvFlat::Kind::add, v, v, v, ""}, prov);
                emit({InvFlat::Kind::add, c.z, u, v, ""}, prov);
                emit({InvFlat::Kind::add, c.x, c.y, u, ""}, prov);
                break;
            }
            case EqConstraint::Kind::invmul: {
                // x * y = 1  becomes  v = 0, y + y2 + v = 0, x * y2 + 1 = 0.
                std::string v = gen.next("fz"), y2 = gen.next("fm");
                declare(v);
                declare(y2);
                out.schedule.entries.push_back({v, SchedOp::term, mk_const(Rational(0))});
                out.schedule.entries.push_back({y2, SchedOp::term, mk_neg(mk_var(c.y))});
                emit({InvFlat::Kind::add, v, v, v, ""}, prov);
                emit({InvFlat::Kind::add, c.y, y2, v, ""}, prov);
                emit({InvFlat::Kind::inv, c.x, y2, "", ""}, prov);
                break;
            }
            case EqConstraint::Kind::fun: {
                // x = f(y)  becomes  v = 0, x + x2 + v = 0, x2 + f(y) = 0.
                std::string v = gen.next("fz"), x2 = gen.next("fm");
                declare(v);
                declare(x2);
                out.schedule.entries.push_back({v, SchedOp::term, mk_const(Rational(0))});
                out.schedule.entries.push_back({x2, SchedOp::term, mk_neg(mk_var(c.x))});
                emit({InvFlat::Kind::add, v, v, v, ""}, prov);
                emit({InvFlat::Kind::add, c.x, x2, v, ""}, prov);
                emit({InvFlat::Kind::fun, x2, c.y, "", c.fn}, prov);
                break;
            }
        }
    }
    return out;
}

ConstraintSystem normalize(const Formula& f, const Signature& sig) {
    Formula d = desugar_negation(f);
    validate_binder_hygiene(d);
    RewriteResult fl = flatten_functions(d, sig);
    RewriteResult el = eliminate_minus_div(fl.formula);
    EqSystem eq = to_equational(el.formula, sig);

    WitnessExtension full;
    full.entries = fl.schedule.entries;
    full.entries.insert(full.entries.end(), el.schedule.entries.begin(), el.schedule.entries.end());
    full.entries.insert(full.entries.end(), eq.schedule.entries.begin(), eq.schedule.entries.end());
    eq.schedule = std::move(full);

    auto fv = free_variables(d);
    auto bv = bound_variables(d);
    eq.source_variables = fv;
    eq.source_variables.insert(eq.source_variables.end(), bv.begin(), bv.end());

    ConstraintSystem out = to_invflat(eq);
    log::info("normalize: " + std::to_string(out.constraints.size()) + " constraints, " +
              std::to_string(out.variables.size()) + " variables");
    return out;
}

} // namespace etrnn
