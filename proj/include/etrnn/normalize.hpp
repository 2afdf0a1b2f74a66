#pragma once

// Normalization pipeline: from a desugared formula down to the flat
// constraint forms, with a witness-extension schedule accumulated along
// the way so source-level witnesses map to system-level witnesses.

#include "etrnn/constraint.hpp"
#include "etrnn/formula.hpp"

namespace etrnn {

// Deterministic fresh-name source. Names look like "$tag.salt.n" where the
// salt tracks the source position being rewritten; regeneration over the
// same input is byte-for-byte identical. The '$' prefix cannot collide
// with parsed identifiers.
class FreshGen {
public:
    std::string next(const std::string& tag) {
        return "$" + tag + "." + std::to_string(salt_) + "." + std::to_string(counter_++);
    }
    void set_salt(int s) { salt_ = s; }

private:
    int counter_ = 0;
    int salt_ = 0;
};

struct RewriteResult {
    Formula formula;
    WitnessExtension schedule;
};

// Witness maps key values by variable name, so binders must neither repeat
// nor shadow a free variable. Throws Errc::unsupported on a clash.
void validate_binder_hygiene(const Formula& f);

// Replaces the argument of every function application by a fresh variable
// pinned with an equality, innermost first:  f(t)  becomes
// exists y (f(y) ... & y = t). Applies to variable arguments too.
RewriteResult flatten_functions(const Formula& f, const Signature& sig);

// Removes unary minus and division from atoms, innermost first:
//   context(-y)   becomes  exists x (context(x) & x + y = 0)
//   context(y/z)  becomes  exists x (context(x) & x * z = y)
// Negative constants are untouched (they are plain constants).
RewriteResult eliminate_minus_div(const Formula& f);

// Translates a desugared, flattened, minus/div-free formula into a
// conjunction of the intermediate equational forms. Comparisons become
// slack equations with inverted slack; disjunction is captured by a
// product of branch residuals forced to zero.
EqSystem to_equational(const Formula& f, const Signature& sig);

// Expands each intermediate form into the final flat forms.
ConstraintSystem to_invflat(const EqSystem& s);

// Full pipeline: desugar, flatten, eliminate, equational, flat. The
// resulting schedule extends an assignment of the source variables (free
// and existential) to the entire variable set.
ConstraintSystem normalize(const Formula& f, const Signature& sig);

} // namespace etrnn
