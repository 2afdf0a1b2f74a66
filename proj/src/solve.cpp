#include "etrnn/solve.hpp"

#include <chrono>
#include <set>

#include "etrnn/enumerate.hpp"
#include "etrnn/log.hpp"
#include "etrnn/normalize.hpp"

namespace etrnn {

namespace {

Verdict kleene_and(Verdict a, Verdict b) {
    if (a == Verdict::certified_false || b == Verdict::certified_false)
        return Verdict::certified_false;
    if (a == Verdict::unknown || b == Verdict::unknown) return Verdict::unknown;
    return Verdict::certified_true;
}

Verdict kleene_or(Verdict a, Verdict b) {
    if (a == Verdict::certified_true || b == Verdict::certified_true)
        return Verdict::certified_true;
    if (a == Verdict::unknown || b == Verdict::unknown) return Verdict::unknown;
    return Verdict::certified_false;
}

Verdict certify_rec(const Formula& f, const BoxEnv& box, const Signature& sig, int depth) {
    return std::visit(
        [&](const auto& n) -> Verdict {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, FLt>) {
                RatInterval e;
                try {
                    e = eval_term_interval(mk_sub(n.lhs, n.rhs), box, sig, depth);
                } catch (const Error&) {
                    return Verdict::unknown;
                }
                if (e.hi < 0) return Verdict::certified_true;
                if (e.lo >= 0) return Verdict::certified_false;
                return Verdict::unknown;
            } else if constexpr (std::is_same_v<T, FAnd>) {
                return kleene_and(certify_rec(n.lhs, box, sig, depth),
                                  certify_rec(n.rhs, box, sig, depth));
            } else if constexpr (std::is_same_v<T, FOr>) {
                return kleene_or(certify_rec(n.lhs, box, sig, depth),
                                 certify_rec(n.rhs, box, sig, depth));
            } else if constexpr (std::is_same_v<T, FExists>) {
                return certify_rec(n.body, box, sig, depth);
            } else {
                throw Error(Errc::unsupported, "not a strict-fragment formula");
            }
        },
        f->v);
}

} // namespace

Verdict certify_at_box(const Formula& f, const BoxEnv& box, const Signature& sig, int depth) {
    if (!is_strict_fragment(f))
        throw Error(Errc::unsupported, "certification needs a strict-fragment formula");
    return certify_rec(f, box, sig, depth);
}

std::vector<std::string> solve_variables(const Formula& f) {
    std::vector<std::string> vars = free_variables(f);
    std::set<std::string> seen(vars.begin(), vars.end());
    for (const std::string& v : bound_variables(f))
        if (seen.insert(v).second) vars.push_back(v);
    return vars;
}

namespace {

struct Deadline {
    std::optional<std::chrono::steady_clock::time_point> at;
    explicit Deadline(const std::optional<double>& seconds) {
        if (seconds)
            at = std::chrono::steady_clock::now() +
                 std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                     std::chrono::duration<double>(*seconds));
    }
    bool passed() const { return at && std::chrono::steady_clock::now() >= *at; }
};

// Tries to certify the formula on boxes of halving radius around the
// point, largest first; openness of strict truth guarantees success for
// small enough radius once the point itself certifies.
std::optional<WitnessBox> expand_box(const Formula& f, const std::vector<std::string>& vars,
                                     const std::vector<Rational>& point, const Signature& sig,
                                     int depth) {
    for (long k = 0; k <= long(depth) + 30; ++k) {
        Rational r = pow2(-k);
        BoxEnv box;
        for (size_t i = 0; i < vars.size(); ++i)
            box[vars[i]] = iv_make(point[i] - r, point[i] + r);
        if (certify_rec(f, box, sig, depth) == Verdict::certified_true)
            return WitnessBox{box, depth, f};
    }
    return std::nullopt;
}

} // namespace

std::optional<WitnessBox> solve(const Formula& f, const Signature& sig, const Budget& budget) {
    if (!is_strict_fragment(f))
        throw Error(Errc::unsupported, "solve needs a strict-fragment formula");
    validate_binder_hygiene(f);
    std::vector<std::string> vars = solve_variables(f);
    Deadline deadline(budget.wall_seconds);

    if (vars.empty()) {
        for (int d = 1; d <= budget.max_depth; ++d) {
            Verdict v = certify_rec(f, {}, sig, d);
            if (v == Verdict::certified_true) return WitnessBox{{}, d, f};
            if (v == Verdict::certified_false) return std::nullopt;
            if (deadline.passed()) return std::nullopt;
        }
        return std::nullopt;
    }

    std::set<BigInt> dead;
    auto cell = [&](const BigInt& index, int depth) -> std::optional<WitnessBox> {
        if (index >= budget.max_index || depth > budget.max_depth) return std::nullopt;
        if (dead.count(index)) return std::nullopt;
        std::vector<Rational> point = nth_tuple(int(vars.size()), index);
        BoxEnv box;
        for (size_t i = 0; i < vars.size(); ++i) box[vars[i]] = iv_point(point[i]);
        Verdict v = certify_rec(f, box, sig, depth);
        if (v == Verdict::certified_false) {
            dead.insert(index);
            return std::nullopt;
        }
        if (v != Verdict::certified_true) return std::nullopt;
        log::debug("solve: point certifies at index " + index.str() + " depth " +
                   std::to_string(depth));
        return expand_box(f, vars, point, sig, depth);
    };

    // Triangular dovetail; stage t contributes the cells of index or
    // depth t - 1 not seen at earlier stages, each visited exactly once.
    BigInt stages = budget.max_index > budget.max_depth ? budget.max_index
                                                        : BigInt(budget.max_depth);
    for (BigInt t = 2; t <= stages + 1; ++t) {
        int row_depth = int(std::min<BigInt>(t - 1, budget.max_depth));
        if (t - 1 <= budget.max_depth)
            for (BigInt i = 0; i < t; ++i) {
                if (deadline.passed()) return std::nullopt;
                if (auto w = cell(i, row_depth)) return w;
            }
        for (int d = 1; d < int(std::min<BigInt>(t - 1, budget.max_depth + 1)); ++d) {
            if (deadline.passed()) return std::nullopt;
            if (auto w = cell(t - 1, d)) return w;
        }
    }
    return std::nullopt;
}

namespace {

std::vector<std::string> poly_variables(const TauPolynomial& p) {
    std::set<std::string> vs;
    for (const auto& term : p.terms)
        for (const auto& atom : term.first) vs.insert(atom.first.var);
    return {vs.begin(), vs.end()};
}

} // namespace

std::optional<std::map<std::string, Rational>> approx_feasible(const TauPolynomial& P,
                                                               const Rational& d,
                                                               const Rational& epsilon,
                                                               const Signature& sig,
                                                               const Budget& budget) {
    if (d <= 0 || epsilon <= 0) throw Error(Errc::domain, "ball radius and tolerance must be positive");
    std::vector<std::string> vars = poly_variables(P);
    Deadline deadline(budget.wall_seconds);

    if (vars.empty()) {
        Rational v = eval_poly_exact(P, {}, sig);
        if (rat_abs(v) < epsilon) return std::map<std::string, Rational>{};
        return std::nullopt;
    }

    std::set<BigInt> dead;
    auto cell = [&](const BigInt& index, int depth) -> std::optional<std::map<std::string, Rational>> {
        if (index >= budget.max_index || depth > budget.max_depth) return std::nullopt;
        if (dead.count(index)) return std::nullopt;
        std::vector<Rational> point = nth_tuple(int(vars.size()), index);
        for (const Rational& q : point)
            if (rat_abs(q) > d) {
                dead.insert(index);
                return std::nullopt;
            }
        std::map<std::string, Rational> env;
        for (size_t i = 0; i < vars.size(); ++i) env[vars[i]] = point[i];
        try {
            Rational v = eval_poly_exact(P, env, sig);
            dead.insert(index); // exactly decided either way
            if (rat_abs(v) < epsilon) return env;
            return std::nullopt;
        } catch (const Error&) {
        }
        BoxEnv box;
        for (const auto& [var, q] : env) box[var] = iv_point(q);
        RatInterval e;
        try {
            e = eval_poly_interval(P, box, sig, depth);
        } catch (const Error&) {
            return std::nullopt;
        }
        if (e.hi < epsilon && e.lo > -epsilon) return env;
        if (e.lo >= epsilon || e.hi <= -epsilon) dead.insert(index);
        return std::nullopt;
    };

    BigInt stages = budget.max_index > budget.max_depth ? budget.max_index
                                                        : BigInt(budget.max_depth);
    for (BigInt t = 2; t <= stages + 1; ++t) {
        int row_depth = int(std::min<BigInt>(t - 1, budget.max_depth));
        if (t - 1 <= budget.max_depth)
            for (BigInt i = 0; i < t; ++i) {
                if (deadline.passed()) return std::nullopt;
                if (auto w = cell(i, row_depth)) return w;
            }
        for (int d2 = 1; d2 < int(std::min<BigInt>(t - 1, budget.max_depth + 1)); ++d2) {
            if (deadline.passed()) return std::nullopt;
            if (auto w = cell(t - 1, d2)) return w;
        }
    }
    return std::nullopt;
}

} // namespace etrnn
