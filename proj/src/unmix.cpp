#include "hyperion/unmix.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace hyperion {

Mat update_S(const Mat& CX, const Mat& T_tilde, const Mat& U, double alpha,
             const Mat& S0, double lambda) {
    const int p = static_cast<int>(CX.rows());
    const int q = static_cast<int>(T_tilde.rows());
    if (T_tilde.cols() != CX.cols() || U.rows() != p || U.cols() != p ||
        S0.rows() != p || S0.cols() != q)
        throw SpecError("update_S: inconsistent shapes");
    if (lambda < 0) throw SpecError("update_S: lambda must be >= 0");

    Mat G = T_tilde * T_tilde.transpose();
    G.diagonal().array() += lambda;
    Eigen::LDLT<Mat> ldlt(G);
    // With lambda > 0 the Gram matrix is strictly PD; singularity can only
    // arise at lambda = 0 with rank-deficient T.
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() < 1e-14 * std::max(1.0, ldlt.vectorD().maxCoeff()))
        throw SpecError("update_S: T T' + lambda I is singular (lambda = 0 with "
                        "rank-deficient T)");
    Mat rhs = CX * T_tilde.transpose() + lambda * alpha * U.transpose() * S0;
    return ldlt.solve(rhs.transpose()).transpose();
}

Mat update_S(const Mat& CX, const AbundanceMatrix& T_tilde, const Mat& U,
             double alpha, const Mat& S0, double lambda) {
    return update_S(CX, T_tilde.matrix(), U, alpha, S0, lambda);
}

Vec fcls_simplex(const Mat& A, const Vec& y) {
    const int q = static_cast<int>(A.cols());
    if (A.rows() != y.size()) throw SpecError("fcls_simplex: shape mismatch");
    if (q < 1 || q > 16) throw SpecError("fcls_simplex: q out of range [1, 16]");

    // Enumerate candidate active sets: for each support, solve the equality-
    // constrained least squares via its KKT system and keep the best feasible
    // candidate. The optimal support is among them, so the minimum is global.
    Vec best;
    double best_obj = std::numeric_limits<double>::infinity();
    const Mat AtA = A.transpose() * A;
    const Vec Aty = A.transpose() * y;
    for (unsigned mask = 1; mask < (1u << q); ++mask) {
        int m = 0;
        for (int j = 0; j < q; ++j)
            if (mask & (1u << j)) ++m;
        Mat K(m + 1, m + 1);
        Vec rhs(m + 1);
        {
            int r = 0;
            for (int i = 0; i < q; ++i) {
                if (!(mask & (1u << i))) continue;
                int c = 0;
                for (int j = 0; j < q; ++j) {
                    if (!(mask & (1u << j))) continue;
                    K(r, c++) = 2.0 * AtA(i, j);
                }
                K(r, m) = 1.0;
                K(m, r) = 1.0;
                rhs(r) = 2.0 * Aty(i);
                ++r;
            }
        }
        K(m, m) = 0.0;
        rhs(m) = 1.0;
        Eigen::FullPivLU<Mat> lu(K);
        if (!lu.isInvertible()) continue;
        Vec sol = lu.solve(rhs);
        if ((sol.head(m).array() < -1e-10).any()) continue;
        Vec t = Vec::Zero(q);
        {
            int r = 0;
            for (int j = 0; j < q; ++j)
                if (mask & (1u << j)) t(j) = std::max(0.0, sol(r++));
        }
        t /= t.sum();
        double obj = (y - A * t).squaredNorm();
        if (obj < best_obj) {
            best_obj = obj;
            best = t;
        }
    }
    if (best.size() == 0) throw SpecError("fcls_simplex: no feasible candidate");
    return best;
}

AbundanceMatrix update_T(const Mat& CX, const Mat& S_tilde) {
    if (CX.rows() != S_tilde.rows()) throw SpecError("update_T: shape mismatch");
    Mat T(S_tilde.cols(), CX.cols());
    for (int n = 0; n < CX.cols(); ++n) T.col(n) = fcls_simplex(S_tilde, CX.col(n));
    return AbundanceMatrix(T);
}

Mat update_U(const Mat& S_tilde, const Mat& S0) {
    if (S_tilde.rows() != S0.rows() || S_tilde.cols() != S0.cols())
        throw SpecError("update_U: shape mismatch");
    Mat M = S_tilde * S0.transpose();
    if (!M.allFinite()) throw SpecError("update_U: non-finite product");
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    // M = D2 S' D1' with D2 = matrixU, D1 = matrixV; trace(U M) is maximized
    // at U = D1 D2'.
    return svd.matrixV() * svd.matrixU().transpose();
}

double regularizer_value(const Mat& S_tilde, const Mat& U, double alpha,
                         const Mat& S0) {
    if (S_tilde.rows() != S0.rows() || S_tilde.cols() != S0.cols() ||
        U.rows() != S_tilde.rows() || U.cols() != S_tilde.rows())
        throw SpecError("regularizer_value: shape mismatch");
    return (S_tilde - alpha * U.transpose() * S0).squaredNorm();
}

double hyperion_objective(const Mat& CX, const Mat& S_tilde, const Mat& T_tilde,
                          const Mat& U, double alpha, const Mat& S0,
                          double lambda) {
    return (CX - S_tilde * T_tilde).squaredNorm() +
           lambda * regularizer_value(S_tilde, U, alpha, S0);
}

SignatureSet recover_signatures(const Mat& S_tilde, const Ellipsoid& e,
                                const Vec& mean, const Mat& basis,
                                const FrequencyGrid& grid,
                                const std::vector<std::string>& labels) {
    const int p = static_cast<int>(S_tilde.rows());
    if (e.F.rows() != p || basis.cols() != p || basis.rows() != mean.size())
        throw SpecError("recover_signatures: shape mismatch");
    Mat back = (e.F * S_tilde).colwise() + e.c;  // undo precondition
    SignatureSet out;
    out.grid = grid;
    out.S = (basis * back).colwise() + mean;     // undo affine projection
    if (!labels.empty()) {
        out.labels = labels;
    } else {
        for (int j = 0; j < S_tilde.cols(); ++j)
            out.labels.push_back("material_" + std::to_string(j + 1));
    }
    out.validate();
    return out;
}

HyperionResult hyperion_unmix(const StandardizedData& data, const HyperionConfig& cfg) {
    if (cfg.q < 2) throw SpecError("hyperion_unmix: q must be >= 2");
    if (cfg.lambda < 0) throw SpecError("hyperion_unmix: lambda must be >= 0");
    if (cfg.max_iters < 1) throw SpecError("hyperion_unmix: max_iters must be >= 1");
    if (data.sample_count() < cfg.q)
        throw SpecError("hyperion_unmix: need at least q samples, got " +
                        std::to_string(data.sample_count()));

    const int q = cfg.q;
    AffineFit af = affine_fit(data, q);
    HPolytope hull = convex_hull_halfspaces(af.projected);
    Ellipsoid E = lje(hull);
    Mat CX = precondition(af.projected, E);

    const Mat S0 = unit_volume_regular_simplex(q);
    const double alpha = simplex_scale_alpha(q);

    HyperionResult res;
    res.ellipsoid = E;
    res.affine_mean = af.mean;
    res.affine_basis = af.basis;

    // Two deterministic starts, anchor and antipodal anchor: edge-midpoint
    // datasets admit a mirror stationary point (the reflected simplex at 1.5x
    // scale also interpolates the data), and which basin the anchor start
    // falls into depends on the data orientation. The lower final objective
    // wins; ties keep the plain anchor.
    bool have_best = false;
    double best_obj = 0;
    for (double sign : {1.0, -1.0}) {
        Mat U = sign * Mat::Identity(q - 1, q - 1);
        Mat S_tilde = alpha * U.transpose() * S0;
        AbundanceMatrix T = update_T(CX, S_tilde);
        std::vector<double> trace;
        std::string diagnostic;

        double obj = hyperion_objective(CX, S_tilde, T.matrix(), U, alpha, S0,
                                        cfg.lambda);
        trace.push_back(obj);
        for (int it = 0; it < cfg.max_iters; ++it) {
            Mat S_new = update_S(CX, T, U, alpha, S0, cfg.lambda);
            AbundanceMatrix T_new = update_T(CX, S_new);
            Mat U_new = update_U(S_new, S0);
            double obj_new = hyperion_objective(CX, S_new, T_new.matrix(), U_new,
                                                alpha, S0, cfg.lambda);
            if (obj_new > obj + 1e-9 * std::max(1.0, std::abs(obj))) {
                // Exact block-coordinate descent cannot increase the objective
                // beyond roundoff; stop rather than accept a bad step.
                diagnostic = "step rejected at iteration " + std::to_string(it) +
                             ": objective rose from " + std::to_string(obj) +
                             " to " + std::to_string(obj_new);
                break;
            }
            S_tilde = S_new;
            T = T_new;
            U = U_new;
            trace.push_back(obj_new);
            double rel = std::abs(obj - obj_new) / std::max(obj, 1e-300);
            obj = obj_new;
            if (rel < cfg.rel_tol) break;
        }
        if (!have_best || obj < best_obj - 1e-12 * std::max(1.0, best_obj)) {
            have_best = true;
            best_obj = obj;
            res.S_tilde = S_tilde;
            res.U = U;
            res.abundances = T;
            res.objective_trace = std::move(trace);
            res.diagnostic = std::move(diagnostic);
        }
    }

    res.signatures =
        recover_signatures(res.S_tilde, E, af.mean, af.basis, data.grid);
    return res;
}

}  // namespace hyperion
