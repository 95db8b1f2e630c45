#ifndef HYPERION_LP_HPP
#define HYPERION_LP_HPP

#include "hyperion/types.hpp"

namespace hyperion {

enum class LpStatus { Optimal, Infeasible, Unbounded };

/// minimize c'x  s.t.  Aeq x = beq,  Ain x <= bin,  x_i >= 0 where nonneg[i].
/// Variables are free unless flagged nonnegative.
struct LpProblem {
    Vec c;
    Mat Aeq;
    Vec beq;
    Mat Ain;
    Vec bin;
    std::vector<bool> nonneg;  // empty means all free
};

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    Vec x;
    double objective = 0;
    Vec dual_eq;   // multipliers of equality rows
    Vec dual_in;   // multipliers of inequality rows (>= 0)
    double gap = 0;  // |primal - dual| certificate residual
};

/// Dense two-phase primal simplex with Bland's rule (deterministic).
LpSolution lp_solve(const LpProblem& prob);

}  // namespace hyperion

#endif
