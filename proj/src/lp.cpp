#include "hyperion/lp.hpp"

#include <cmath>
#include <limits>

namespace hyperion {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-9;
constexpr int kMaxPivots = 200000;

struct Tableau {
    Mat T;                 // m x (ncols + 1), last column is RHS
    Vec cost;              // reduced-cost row, ncols
    double obj = 0;        // negated objective accumulator
    std::vector<int> basis;
    std::vector<bool> allowed;
    int m, ncols;

    void pivot(int row, int col) {
        T.row(row) /= T(row, col);
        for (int i = 0; i < m; ++i) {
            if (i == row) continue;
            double f = T(i, col);
            if (f != 0) T.row(i) -= f * T.row(row);
        }
        double f = cost[col];
        if (f != 0) {
            cost -= f * T.row(row).head(ncols);
            obj -= f * T(row, ncols);
        }
        basis[row] = col;
    }

    // Bland's rule. Returns Optimal or Unbounded.
    LpStatus run() {
        for (int iter = 0; iter < kMaxPivots; ++iter) {
            int enter = -1;
            for (int j = 0; j < ncols; ++j) {
                if (allowed[j] && cost[j] < -kCostTol) { enter = j; break; }
            }
            if (enter < 0) return LpStatus::Optimal;
            int leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m; ++i) {
                if (T(i, enter) > kPivotTol) {
                    double ratio = T(i, ncols) / T(i, enter);
                    if (ratio < best - 1e-12 ||
                        (ratio < best + 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
                        best = ratio;
                        leave = i;
                    }
                }
            }
            if (leave < 0) return LpStatus::Unbounded;
            pivot(leave, enter);
        }
        throw SpecError("lp_solve: pivot limit exceeded");
    }
};

}  // namespace

LpSolution lp_solve(const LpProblem& prob) {
    const int nv = static_cast<int>(prob.c.size());
    const int me = static_cast<int>(prob.beq.size());
    const int mi = static_cast<int>(prob.bin.size());
    const int m = me + mi;
    if (me > 0 && prob.Aeq.cols() != nv) throw SpecError("lp_solve: Aeq shape");
    if (mi > 0 && prob.Ain.cols() != nv) throw SpecError("lp_solve: Ain shape");

    std::vector<bool> nonneg = prob.nonneg;
    if (nonneg.empty()) nonneg.assign(nv, false);
    if (static_cast<int>(nonneg.size()) != nv) throw SpecError("lp_solve: nonneg size");

    // Column layout: split structural vars, then slacks, then artificials.
    std::vector<int> col_of_pos(nv), col_of_neg(nv, -1);
    int nstruct = 0;
    for (int i = 0; i < nv; ++i) {
        col_of_pos[i] = nstruct++;
        if (!nonneg[i]) col_of_neg[i] = nstruct++;
    }
    const int slack0 = nstruct;
    const int art0 = nstruct + mi;
    const int ncols = art0 + m;

    Tableau tab;
    tab.m = m;
    tab.ncols = ncols;
    tab.T = Mat::Zero(m, ncols + 1);
    Vec rowsign(m);
    for (int r = 0; r < m; ++r) {
        Vec a = r < me ? Vec(prob.Aeq.row(r)) : Vec(prob.Ain.row(r - me));
        double b = r < me ? prob.beq[r] : prob.bin[r - me];
        double s = (b < 0) ? -1.0 : 1.0;
        rowsign[r] = s;
        for (int i = 0; i < nv; ++i) {
            tab.T(r, col_of_pos[i]) = s * a[i];
            if (col_of_neg[i] >= 0) tab.T(r, col_of_neg[i]) = -s * a[i];
        }
        if (r >= me) tab.T(r, slack0 + (r - me)) = s;
        tab.T(r, art0 + r) = 1.0;
        tab.T(r, ncols) = s * b;
    }

    // Phase 1: minimize the sum of artificials.
    tab.basis.resize(m);
    tab.allowed.assign(ncols, true);
    tab.cost = Vec::Zero(ncols);
    tab.obj = 0;
    for (int r = 0; r < m; ++r) {
        tab.basis[r] = art0 + r;
        tab.cost -= tab.T.row(r).head(ncols);
        tab.obj -= tab.T(r, ncols);
    }
    for (int r = 0; r < m; ++r) tab.cost[art0 + r] = 0;
    tab.run();

    LpSolution sol;
    if (-tab.obj > 1e-7) {
        sol.status = LpStatus::Infeasible;
        return sol;
    }
    // Drive remaining artificials out of the basis where possible.
    for (int r = 0; r < m; ++r) {
        if (tab.basis[r] >= art0) {
            for (int j = 0; j < art0; ++j) {
                if (std::abs(tab.T(r, j)) > 1e-8) { tab.pivot(r, j); break; }
            }
        }
    }

    // Phase 2 with the real costs; artificials may not re-enter.
    Vec c2 = Vec::Zero(ncols);
    for (int i = 0; i < nv; ++i) {
        c2[col_of_pos[i]] = prob.c[i];
        if (col_of_neg[i] >= 0) c2[col_of_neg[i]] = -prob.c[i];
    }
    for (int j = art0; j < ncols; ++j) tab.allowed[j] = false;
    tab.cost = c2;
    tab.obj = 0;
    for (int r = 0; r < m; ++r) {
        double cb = c2[tab.basis[r]];
        if (cb != 0) {
            tab.cost -= cb * tab.T.row(r).head(ncols);
            tab.obj -= cb * tab.T(r, ncols);
        }
    }
    LpStatus st = tab.run();
    if (st == LpStatus::Unbounded) {
        sol.status = LpStatus::Unbounded;
        return sol;
    }

    sol.status = LpStatus::Optimal;
    sol.x = Vec::Zero(nv);
    for (int r = 0; r < m; ++r) {
        int j = tab.basis[r];
        double v = tab.T(r, ncols);
        for (int i = 0; i < nv; ++i) {
            if (j == col_of_pos[i]) sol.x[i] += v;
            if (j == col_of_neg[i]) sol.x[i] -= v;
        }
    }
    sol.objective = prob.c.dot(sol.x);

    // Simplex multipliers from the artificial (identity) columns:
    // y_hat_r = -cost[art_r]; translate through the row-sign flips.
    sol.dual_eq = Vec::Zero(me);
    sol.dual_in = Vec::Zero(mi);
    double dual_obj = 0;
    for (int r = 0; r < m; ++r) {
        double yhat = -tab.cost[art0 + r];
        double y = rowsign[r] * yhat;
        double b = r < me ? prob.beq[r] : prob.bin[r - me];
        if (r < me) {
            sol.dual_eq[r] = y;
            dual_obj += b * y;
        } else {
            sol.dual_in[r - me] = -y;  // >= 0 at optimality
            dual_obj -= b * (-y);
        }
    }
    sol.gap = std::abs(sol.objective - dual_obj);
    return sol;
}

}  // namespace hyperion
