#include "etrnn/polynomial.hpp"

#include <set>

namespace etrnn {

namespace {

void accumulate(std::map<Monomial, Rational>& terms, const Monomial& m, const Rational& c) {
    auto it = terms.find(m);
    if (it == terms.end()) {
        if (c != 0) terms.emplace(m, c);
        return;
    }
    it->second += c;
    if (it->second == 0) terms.erase(it);
}

} // namespace

TauPolynomial poly_const(const Rational& c) {
    TauPolynomial p;
    if (c != 0) p.terms.emplace(Monomial{}, c);
    return p;
}

TauPolynomial poly_var(const std::string& v) {
    TauPolynomial p;
    p.terms.emplace(Monomial{{PolyAtom{"", v}, 1}}, Rational(1));
    return p;
}

TauPolynomial poly_apply(const std::string& fn, const std::string& var) {
    TauPolynomial p;
    p.terms.emplace(Monomial{{PolyAtom{fn, var}, 1}}, Rational(1));
    return p;
}

TauPolynomial poly_add(const TauPolynomial& a, const TauPolynomial& b) {
    TauPolynomial p = a;
    for (const auto& [m, c] : b.terms) accumulate(p.terms, m, c);
    return p;
}

TauPolynomial poly_neg(const TauPolynomial& a) {
    TauPolynomial p;
    for (const auto& [m, c] : a.terms) p.terms.emplace(m, Rational(-c));
    return p;
}

TauPolynomial poly_sub(const TauPolynomial& a, const TauPolynomial& b) {
    return poly_add(a, poly_neg(b));
}

TauPolynomial poly_mul(const TauPolynomial& a, const TauPolynomial& b) {
    TauPolynomial p;
    for (const auto& [ma, ca] : a.terms) {
        for (const auto& [mb, cb] : b.terms) {
            Monomial m = ma;
            for (const auto& [atom, e] : mb) m[atom] += e;
            accumulate(p.terms, m, Rational(ca * cb));
        }
    }
    return p;
}

bool poly_equal(const TauPolynomial& a, const TauPolynomial& b) { return a.terms == b.terms; }

bool poly_is_zero(const TauPolynomial& a) { return a.terms.empty(); }

int poly_degree(const TauPolynomial& p) {
    int deg = 0;
    for (const auto& [m, c] : p.terms) {
        int d = 0;
        for (const auto& [atom, e] : m) d += e;
        deg = std::max(deg, d);
    }
    return deg;
}

std::string render(const TauPolynomial& p) {
    if (p.terms.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : p.terms) {
        Rational a = rat_abs(c);
        if (first) {
            if (c < 0) out += "-";
            first = false;
        } else {
            out += c < 0 ? " - " : " + ";
        }
        std::string mono;
        for (const auto& [atom, e] : m) {
            if (!mono.empty()) mono += " * ";
            mono += atom.fn.empty() ? atom.var : atom.fn + "(" + atom.var + ")";
            if (e > 1) mono += "^" + std::to_string(e);
        }
        if (mono.empty()) out += rat_to_string(a);
        else if (a == 1) out += mono;
        else out += rat_to_string(a) + " * " + mono;
    }
    return out;
}

namespace {

Rational atom_value_exact(const PolyAtom& atom, const ExactEnv& env, const Signature& sig) {
    auto it = env.find(atom.var);
    if (it == env.end()) throw Error(Errc::symbol, "unbound variable '" + atom.var + "'");
    if (atom.fn.empty()) return it->second;
    const ActivationSpec& spec = sig.find(atom.fn);
    if (spec.exact_eval) return spec.exact_eval(it->second);
    if (it->second == 0 && spec.value_at_zero) return *spec.value_at_zero;
    throw Error(Errc::eval, "no exact value for " + atom.fn + "(" + rat_to_string(it->second) + ")");
}

RatInterval atom_value_interval(const PolyAtom& atom, const BoxEnv& env, const Signature& sig,
                                int depth) {
    auto it = env.find(atom.var);
    if (it == env.end()) throw Error(Errc::symbol, "unbound variable '" + atom.var + "'");
    if (atom.fn.empty()) return it->second;
    return sig.find(atom.fn).interval_eval(it->second, depth);
}

} // namespace

Rational eval_poly_exact(const TauPolynomial& p, const ExactEnv& env, const Signature& sig) {
    Rational sum = 0;
    for (const auto& [m, c] : p.terms) {
        Rational t = c;
        for (const auto& [atom, e] : m) {
            Rational v = atom_value_exact(atom, env, sig);
            for (int i = 0; i < e; ++i) t *= v;
        }
        sum += t;
    }
    return sum;
}

RatInterval eval_poly_interval(const TauPolynomial& p, const BoxEnv& env, const Signature& sig,
                               int depth) {
    RatInterval sum = iv_point(Rational(0));
    for (const auto& [m, c] : p.terms) {
        RatInterval t = iv_point(c);
        for (const auto& [atom, e] : m) {
            RatInterval v = atom_value_interval(atom, env, sig, depth);
            for (int i = 0; i < e; ++i) t = iv_mul(t, v);
        }
        sum = iv_add(sum, t);
    }
    return sum;
}

namespace {

// Precondition walkers: the builder accepts only the flat shape.
void require_flat_term(const Term& t, const Signature& sig) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, TAdd> || std::is_same_v<T, TMul>) {
                require_flat_term(n.lhs, sig);
                require_flat_term(n.rhs, sig);
            } else if constexpr (std::is_same_v<T, TNeg> || std::is_same_v<T, TDiv>) {
                throw Error(Errc::unsupported,
                            "minus/div reached the polynomial builder; eliminate them first");
            } else if constexpr (std::is_same_v<T, TApply>) {
                sig.find(n.fn);
                if (!std::holds_alternative<TVar>(n.arg->v))
                    throw Error(Errc::unsupported, "function argument is not a variable; "
                                                   "flatten the formula first");
            }
        },
        t->v);
}

void require_flat(const Formula& f, const Signature& sig) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, FLt> || std::is_same_v<T, FEq>) {
                require_flat_term(n.lhs, sig);
                require_flat_term(n.rhs, sig);
            } else if constexpr (std::is_same_v<T, FAnd> || std::is_same_v<T, FOr>) {
                require_flat(n.lhs, sig);
                require_flat(n.rhs, sig);
            } else if constexpr (std::is_same_v<T, FNot>) {
                throw Error(Errc::unsupported,
                            "negation reached the polynomial builder; desugar first");
            } else {
                require_flat(n.body, sig);
            }
        },
        f->v);
}

class Feas4Builder {
public:
    void collect(const Formula& f) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, FAnd>) {
                    collect(n.lhs);
                    collect(n.rhs);
                } else if constexpr (std::is_same_v<T, FExists>) {
                    declare(n.var);
                    collect(n.body);
                } else if constexpr (std::is_same_v<T, FEq>) {
                    gen_.set_salt(salt_++);
                    TauPolynomial l = poly(n.lhs);
                    TauPolynomial r = poly(n.rhs);
                    push(poly_sub(l, r));
                } else if constexpr (std::is_same_v<T, FLt>) {
                    gen_.set_salt(salt_++);
                    slack_residuals(n.lhs, n.rhs);
                } else if constexpr (std::is_same_v<T, FOr>) {
                    gen_.set_salt(salt_++);
                    std::string vl = branch(n.lhs);
                    std::string vr = branch(n.rhs);
                    push(poly_mul(poly_var(vl), poly_var(vr)));
                } else {
                    throw Error(Errc::unsupported, "negation in polynomial builder");
                }
            },
            f->v);
    }

    Feas4 take() && {
        for (const TauPolynomial& r : residuals_)
            out_.poly = poly_add(out_.poly, poly_mul(r, r));
        return std::move(out_);
    }

private:
    void declare(const std::string& v) {
        if (declared_.insert(v).second) out_.variables.push_back(v);
    }

    std::string fresh(const std::string& tag) {
        std::string v = gen_.next(tag);
        declare(v);
        return v;
    }

    void sched(const std::string& var, SchedOp op, Term expr) {
        out_.schedule.entries.push_back({var, op, std::move(expr)});
    }

    void push(TauPolynomial r) { residuals_.push_back(std::move(r)); }

    // Polynomial of a term, degree at most 2. Products that would pass
    // degree 2 route the offending factor through a fresh variable pinned
    // by its own residual.
    TauPolynomial poly(const Term& t) {
        return std::visit(
            [&](const auto& n) -> TauPolynomial {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, TVar>) {
                    declare(n.name);
                    return poly_var(n.name);
                } else if constexpr (std::is_same_v<T, TConst>) {
                    return poly_const(n.value);
                } else if constexpr (std::is_same_v<T, TAdd>) {
                    TauPolynomial l = poly(n.lhs);
                    TauPolynomial r = poly(n.rhs);
                    return poly_add(l, r);
                } else if constexpr (std::is_same_v<T, TMul>) {
                    TauPolynomial l = poly(n.lhs);
                    TauPolynomial r = poly(n.rhs);
                    if (poly_degree(l) + poly_degree(r) > 2) {
                        if (poly_degree(l) > 1) l = poly_var(linearize(n.lhs));
                        if (poly_degree(l) + poly_degree(r) > 2)
                            r = poly_var(linearize(n.rhs));
                    }
                    return poly_mul(l, r);
                } else if constexpr (std::is_same_v<T, TApply>) {
                    const std::string& arg = std::get<TVar>(n.arg->v).name;
                    declare(arg);
                    return poly_apply(n.fn, arg);
                } else {
                    throw Error(Errc::unsupported, "minus/div in polynomial builder");
                }
            },
            t->v);
    }

    // Fresh variable equal to the term, forced by its own degree-<=2
    // residual. Syntactically equal terms share one variable.
    std::string linearize(const Term& t) {
        std::string key = ::etrnn::render(t);
        if (auto it = lin_cache_.find(key); it != lin_cache_.end()) return it->second;
        TauPolynomial value = poly(t);
        std::string m = fresh("m");
        sched(m, SchedOp::term, t);
        push(poly_sub(poly_var(m), value));
        lin_cache_.emplace(std::move(key), m);
        return m;
    }

    // a < b at conjunctive level:  s := b - a  with  s = v*v  and  s*u = 1.
    void slack_residuals(const Term& a, const Term& b) {
        TauPolynomial pa = poly(a);
        TauPolynomial pb = poly(b);
        std::string s = fresh("s");
        sched(s, SchedOp::term, mk_sub(b, a));
        std::string v = fresh("v");
        sched(v, SchedOp::sqrt_exact, mk_var(s));
        std::string u = fresh("u");
        sched(u, SchedOp::term, mk_div(mk_const(Rational(1)), mk_var(s)));
        push(poly_sub(poly_sub(pb, pa), poly_var(s)));
        push(poly_sub(poly_var(s), poly_mul(poly_var(v), poly_var(v))));
        push(poly_sub(poly_mul(poly_var(s), poly_var(u)), poly_const(Rational(1))));
    }

    // Captured residual value of a disjunct: a fresh variable that is 0
    // exactly when the branch holds, pinned by degree-<=2 residuals. Total
    // in all cases, so the inactive branch still evaluates.
    std::string branch(const Formula& f) {
        return std::visit(
            [&](const auto& n) -> std::string {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, FEq>) {
                    TauPolynomial l = poly(n.lhs);
                    TauPolynomial r = poly(n.rhs);
                    std::string q = fresh("q");
                    sched(q, SchedOp::term, mk_sub(n.lhs, n.rhs));
                    push(poly_sub(poly_var(q), poly_sub(l, r)));
                    return q;
                } else if constexpr (std::is_same_v<T, FLt>) {
                    return branch_lt(n.lhs, n.rhs);
                } else if constexpr (std::is_same_v<T, FAnd>) {
                    std::string vl = branch(n.lhs);
                    std::string vr = branch(n.rhs);
                    std::string w = fresh("w");
                    Term sum = mk_add(mk_mul(mk_var(vl), mk_var(vl)),
                                      mk_mul(mk_var(vr), mk_var(vr)));
                    sched(w, SchedOp::term, sum);
                    push(poly_sub(poly_var(w),
                                  poly_add(poly_mul(poly_var(vl), poly_var(vl)),
                                           poly_mul(poly_var(vr), poly_var(vr)))));
                    return w;
                } else if constexpr (std::is_same_v<T, FOr>) {
                    std::string vl = branch(n.lhs);
                    std::string vr = branch(n.rhs);
                    std::string w = fresh("w");
                    sched(w, SchedOp::term, mk_mul(mk_var(vl), mk_var(vr)));
                    push(poly_sub(poly_var(w), poly_mul(poly_var(vl), poly_var(vr))));
                    return w;
                } else if constexpr (std::is_same_v<T, FExists>) {
                    declare(n.var);
                    return branch(n.body);
                } else {
                    throw Error(Errc::unsupported, "negation in polynomial builder");
                }
            },
            f->v);
    }

    // Branch value for a < b: with d := b - a, s := v^2 for v the real
    // root of d when d >= 0 (else 0), and u := 1/s (else 0), the value
    // (d - s)^2 + (s*u - 1)^2 is 0 exactly when d > 0.
    std::string branch_lt(const Term& a, const Term& b) {
        TauPolynomial pa = poly(a);
        TauPolynomial pb = poly(b);
        std::string d = fresh("d");
        sched(d, SchedOp::term, mk_sub(b, a));
        push(poly_sub(poly_var(d), poly_sub(pb, pa)));
        std::string v = fresh("v");
        sched(v, SchedOp::sqrt_or_zero, mk_var(d));
        std::string s = fresh("s");
        sched(s, SchedOp::term, mk_mul(mk_var(v), mk_var(v)));
        push(poly_sub(poly_var(s), poly_mul(poly_var(v), poly_var(v))));
        std::string u = fresh("u");
        sched(u, SchedOp::inv_or_zero, mk_var(s));
        std::string q = fresh("q");
        sched(q, SchedOp::term, mk_sub(mk_mul(mk_var(s), mk_var(u)), mk_const(Rational(1))));
        push(poly_sub(poly_var(q),
                      poly_sub(poly_mul(poly_var(s), poly_var(u)), poly_const(Rational(1)))));
        std::string w = fresh("w");
        Term dmins = mk_sub(mk_var(d), mk_var(s));
        sched(w, SchedOp::term, mk_add(mk_mul(dmins, dmins), mk_mul(mk_var(q), mk_var(q))));
        TauPolynomial p = poly_sub(poly_var(d), poly_var(s));
        push(poly_sub(poly_var(w),
                      poly_add(poly_mul(p, p), poly_mul(poly_var(q), poly_var(q)))));
        return w;
    }

    FreshGen gen_;
    Feas4 out_;
    std::vector<TauPolynomial> residuals_;
    std::set<std::string> declared_;
    std::map<std::string, std::string> lin_cache_;
    int salt_ = 0;
};

} // namespace

Feas4 build_4feas(const Formula& f, const Signature& sig) {
    validate_binder_hygiene(f);
    require_flat(f, sig);
    Feas4Builder b;
    b.collect(f);
    Feas4 out = std::move(b).take();
    out.source_variables = free_variables(f);
    auto bv = bound_variables(f);
    out.source_variables.insert(out.source_variables.end(), bv.begin(), bv.end());
    return out;
}

Feas4 build_4feas_pipeline(const Formula& f, const Signature& sig) {
    Formula d = desugar_negation(f);
    validate_binder_hygiene(d);
    RewriteResult fl = flatten_functions(d, sig);
    RewriteResult el = eliminate_minus_div(fl.formula);
    Feas4 out = build_4feas(el.formula, sig);

    WitnessExtension full;
    full.entries = fl.schedule.entries;
    full.entries.insert(full.entries.end(), el.schedule.entries.begin(), el.schedule.entries.end());
    full.entries.insert(full.entries.end(), out.schedule.entries.begin(),
                        out.schedule.entries.end());
    out.schedule = std::move(full);

    out.source_variables = free_variables(d);
    auto bv = bound_variables(d);
    out.source_variables.insert(out.source_variables.end(), bv.begin(), bv.end());
    return out;
}

} // namespace etrnn
