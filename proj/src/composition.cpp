#include "hyperion/composition.hpp"

#include <cmath>

namespace hyperion {

Vec estimate_composition(const Vec& x, const Mat& A, double gap_tol) {
    const int k = static_cast<int>(A.rows());
    const int q = static_cast<int>(A.cols());
    if (x.size() != k) throw SpecError("estimate_composition: grid mismatch");
    if (q < 2) throw SpecError("estimate_composition: need q >= 2");

    // Variables [r; t], all nonnegative: minimize 1't with A r - t <= x and
    // -A r - t <= -x, 1'r = 1.
    LpProblem prob;
    prob.c = Vec::Zero(q + k);
    prob.c.tail(k).setOnes();
    prob.Aeq = Mat::Zero(1, q + k);
    prob.Aeq.leftCols(q).setOnes();
    prob.beq = Vec::Ones(1);
    prob.Ain = Mat::Zero(2 * k, q + k);
    prob.Ain.topLeftCorner(k, q) = A;
    prob.Ain.bottomLeftCorner(k, q) = -A;
    prob.Ain.topRightCorner(k, k) = -Mat::Identity(k, k);
    prob.Ain.bottomRightCorner(k, k) = -Mat::Identity(k, k);
    prob.bin.resize(2 * k);
    prob.bin.head(k) = x;
    prob.bin.tail(k) = -x;
    prob.nonneg.assign(q + k, true);

    LpSolution sol = lp_solve(prob);
    if (sol.status != LpStatus::Optimal)
        throw SpecError("estimate_composition: LP reported " +
                        std::string(sol.status == LpStatus::Infeasible ? "infeasible"
                                                                       : "unbounded") +
                        " (internal failure: the simplex is nonempty)");
    if (!(sol.gap < gap_tol))
        throw SpecError("estimate_composition: duality gap " + std::to_string(sol.gap) +
                        " exceeds tolerance");
    Vec r = sol.x.head(q).cwiseMax(0.0);
    double s = r.sum();
    if (!(s > 0)) throw SpecError("estimate_composition: degenerate solution");
    return r / s;
}

Vec estimate_composition(const Vec& x, const SignatureSet& library, double gap_tol) {
    if (x.size() != library.grid.k)
        throw SpecError("estimate_composition: grid mismatch");
    return estimate_composition(x, library.S, gap_tol);
}

Mat estimate_compositions(const Mat& X, const Mat& A, double gap_tol) {
    Mat R(A.cols(), X.cols());
    for (int j = 0; j < X.cols(); ++j)
        R.col(j) = estimate_composition(X.col(j), A, gap_tol);
    return R;
}

}  // namespace hyperion
