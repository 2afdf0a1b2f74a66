#include "etrnn/schedule.hpp"

#include <algorithm>

#include "etrnn/formula.hpp"

namespace etrnn {

namespace {

bool refs_any(const Term& t, const std::vector<std::string>& names) {
    if (names.empty()) return false;
    for (const std::string& v : free_variables(t))
        if (std::find(names.begin(), names.end(), v) != names.end()) return true;
    return false;
}

} // namespace

Extension extend_witness(const WitnessExtension& sched, const std::map<std::string, Rational>& base,
                         const Signature& sig, int depth) {
    Extension ext;
    for (const auto& [k, v] : base) {
        ext.values[k] = v;
        ext.boxes[k] = iv_point(v);
    }
    for (const SchedEntry& e : sched.entries) {
        if (ext.boxes.count(e.var) || ext.values.count(e.var))
            throw Error(Errc::internal, "schedule redefines variable '" + e.var + "'");
        if (refs_any(e.expr, ext.failed)) {
            ext.failed.push_back(e.var);
            continue;
        }
        bool arg_inexact = refs_any(e.expr, ext.inexact);

        auto put_exact = [&](const Rational& v) {
            ext.values[e.var] = v;
            ext.boxes[e.var] = iv_point(v);
        };
        auto put_box = [&](const RatInterval& b) {
            ext.boxes[e.var] = b;
            ext.inexact.push_back(e.var);
        };
        auto eval_box = [&]() { return eval_term_interval(e.expr, ext.boxes, sig, depth); };

        try {
            switch (e.op) {
                case SchedOp::term: {
                    if (arg_inexact) {
                        put_box(eval_box());
                        break;
                    }
                    try {
                        put_exact(eval_term_exact(e.expr, ext.values, sig));
                    } catch (const Error& err) {
                        if (err.code() != Errc::eval) throw;
                        // Irrational activation value; fall back to an enclosure.
                        put_box(eval_box());
                    }
                    break;
                }
                case SchedOp::sqrt_exact: {
                    if (arg_inexact) {
                        put_box(iv_sqrt(eval_box(), depth + 10));
                        break;
                    }
                    Rational a = eval_term_exact(e.expr, ext.values, sig);
                    if (auto r = rat_sqrt_exact(a)) {
                        put_exact(*r);
                    } else if (a > 0) {
                        put_box(iv_sqrt(iv_point(a), depth + 10));
                    } else {
                        ext.failed.push_back(e.var);
                    }
                    break;
                }
                case SchedOp::sqrt_or_zero: {
                    // Realizes w := sqrt(a) for a >= 0 and w := 0 for a < 0.
                    if (arg_inexact) {
                        RatInterval b = eval_box();
                        if (b.hi < 0) put_exact(Rational(0));
                        else if (b.lo >= 0) put_box(iv_sqrt(b, depth + 10));
                        else ext.failed.push_back(e.var);
                        break;
                    }
                    Rational a = eval_term_exact(e.expr, ext.values, sig);
                    if (a < 0) put_exact(Rational(0));
                    else if (auto r = rat_sqrt_exact(a)) put_exact(*r);
                    else put_box(iv_sqrt(iv_point(a), depth + 10));
                    break;
                }
                case SchedOp::inv_or_zero: {
                    if (arg_inexact) {
                        RatInterval b = eval_box();
                        if (b.lo > 0 || b.hi < 0)
                            put_box(iv_div(iv_point(Rational(1)), b));
                        else
                            ext.failed.push_back(e.var);
                        break;
                    }
                    Rational a = eval_term_exact(e.expr, ext.values, sig);
                    put_exact(a == 0 ? Rational(0) : Rational(1 / a));
                    break;
                }
            }
        } catch (const Error& err) {
            if (err.code() == Errc::internal) throw;
            ext.failed.push_back(e.var);
        }
    }
    return ext;
}

} // namespace etrnn
