#include "etrnn/eval.hpp"

#include <optional>

namespace etrnn {

Rational eval_term_exact(const Term& t, const ExactEnv& env, const Signature& sig) {
    return std::visit(
        [&](const auto& n) -> Rational {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, TVar>) {
                auto it = env.find(n.name);
                if (it == env.end()) throw Error(Errc::symbol, "unbound variable '" + n.name + "'");
                return it->second;
            } else if constexpr (std::is_same_v<T, TConst>) {
                return n.value;
            } else if constexpr (std::is_same_v<T, TAdd>) {
                return eval_term_exact(n.lhs, env, sig) + eval_term_exact(n.rhs, env, sig);
            } else if constexpr (std::is_same_v<T, TMul>) {
                return eval_term_exact(n.lhs, env, sig) * eval_term_exact(n.rhs, env, sig);
            } else if constexpr (std::is_same_v<T, TNeg>) {
                return -eval_term_exact(n.arg, env, sig);
            } else if constexpr (std::is_same_v<T, TDiv>) {
                Rational d = eval_term_exact(n.den, env, sig);
                if (d == 0) throw Error(Errc::domain, "division by zero");
                return eval_term_exact(n.num, env, sig) / d;
            } else {
                const ActivationSpec& spec = sig.find(n.fn);
                Rational a = eval_term_exact(n.arg, env, sig);
                if (spec.exact_eval) return spec.exact_eval(a);
                if (a == 0 && spec.value_at_zero) return *spec.value_at_zero;
                throw Error(Errc::eval,
                            "no exact value for " + n.fn + "(" + rat_to_string(a) + ")");
            }
        },
        t->v);
}

namespace {

RatInterval eval_raw(const Term& t, const BoxEnv& env, const Signature& sig, int depth) {
    return std::visit(
        [&](const auto& n) -> RatInterval {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, TVar>) {
                auto it = env.find(n.name);
                if (it == env.end()) throw Error(Errc::symbol, "unbound variable '" + n.name + "'");
                return it->second;
            } else if constexpr (std::is_same_v<T, TConst>) {
                return iv_point(n.value);
            } else if constexpr (std::is_same_v<T, TAdd>) {
                return iv_add(eval_raw(n.lhs, env, sig, depth), eval_raw(n.rhs, env, sig, depth));
            } else if constexpr (std::is_same_v<T, TMul>) {
                return iv_mul(eval_raw(n.lhs, env, sig, depth), eval_raw(n.rhs, env, sig, depth));
            } else if constexpr (std::is_same_v<T, TNeg>) {
                return iv_neg(eval_raw(n.arg, env, sig, depth));
            } else if constexpr (std::is_same_v<T, TDiv>) {
                return iv_div(eval_raw(n.num, env, sig, depth), eval_raw(n.den, env, sig, depth));
            } else {
                const ActivationSpec& spec = sig.find(n.fn);
                return spec.interval_eval(eval_raw(n.arg, env, sig, depth), depth);
            }
        },
        t->v);
}

} // namespace

RatInterval eval_term_interval(const Term& t, const BoxEnv& env, const Signature& sig, int depth) {
    int d = depth < 1 ? 1 : depth;
    std::optional<RatInterval> acc;
    std::optional<Error> last;
    for (int k = 1; k <= d; ++k) {
        try {
            RatInterval pass = eval_raw(t, env, sig, k);
            acc = acc ? iv_meet(*acc, pass) : pass;
        } catch (const Error& e) {
            if (e.code() != Errc::domain) throw;
            last = e;
        }
    }
    if (!acc) throw *last;
    return *acc;
}

} // namespace etrnn
