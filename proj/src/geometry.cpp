#include "hyperion/geometry.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "hyperion/lp.hpp"

namespace hyperion {

namespace {

// Normal of the hyperplane through the p columns of pts (p x p) by cofactor
// expansion over the (p-1) x p difference matrix. Not normalized.
Vec hyperplane_normal(const Mat& pts) {
    const int p = static_cast<int>(pts.rows());
    Mat D(p - 1, p);
    for (int i = 1; i < p; ++i) D.row(i - 1) = (pts.col(i) - pts.col(0)).transpose();
    Vec n(p);
    if (p == 2) {
        n[0] = -D(0, 1);
        n[1] = D(0, 0);
        return n;
    }
    Mat minor(p - 1, p - 1);
    for (int j = 0; j < p; ++j) {
        int cc = 0;
        for (int col = 0; col < p; ++col) {
            if (col == j) continue;
            minor.col(cc++) = D.col(col);
        }
        n[j] = ((j % 2) ? -1.0 : 1.0) * minor.determinant();
    }
    return n;
}

double binomial(int n, int k) {
    double r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

}  // namespace

HPolytope::HPolytope(Mat normals, Vec offsets) : B(std::move(normals)), h(std::move(offsets)) {
    if (B.rows() != h.size() || B.rows() == 0)
        throw SpecError("HPolytope: inconsistent halfspace data");
    dim = static_cast<int>(B.cols());
    for (int i = 0; i < B.rows(); ++i) {
        double norm = B.row(i).norm();
        if (!(norm > 0)) throw SpecError("HPolytope: zero normal");
        B.row(i) /= norm;
        h[i] /= norm;
    }
    // Nonempty and bounded: max +-e_j'x must be finite for every axis.
    for (int j = 0; j < dim; ++j) {
        for (double sign : {1.0, -1.0}) {
            LpProblem lp;
            lp.c = Vec::Zero(dim);
            lp.c[j] = -sign;  // maximize sign * e_j'x
            lp.Ain = B;
            lp.bin = h;
            LpSolution sol = lp_solve(lp);
            if (sol.status == LpStatus::Infeasible)
                throw SpecError("HPolytope: empty polytope");
            if (sol.status == LpStatus::Unbounded)
                throw SpecError("HPolytope: unbounded along axis " + std::to_string(j));
        }
    }
}

bool HPolytope::contains(const Vec& x, double tol) const {
    return ((B * x - h).array() <= tol).all();
}

Ellipsoid::Ellipsoid(Mat shape, Vec center) : F(std::move(shape)), c(std::move(center)) {
    if (F.rows() != F.cols() || F.rows() != c.size())
        throw SpecError("Ellipsoid: shape mismatch");
    if ((F - F.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, F.cwiseAbs().maxCoeff()))
        throw SpecError("Ellipsoid: F not symmetric");
    F = ((F + F.transpose()) / 2.0).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(F);
    if (es.eigenvalues().minCoeff() <= 0)
        throw SpecError("Ellipsoid: F not positive definite");
}

HPolytope convex_hull_halfspaces(const Mat& points) {
    const int p = static_cast<int>(points.rows());
    const int l = static_cast<int>(points.cols());
    if (p < 2 || p > 5)
        throw SpecError("convex_hull_halfspaces: dimension must be in [2,5]");
    if (l > 500) throw SpecError("convex_hull_halfspaces: more than 500 points");
    if (l < p + 1)
        throw SpecError("convex_hull_halfspaces: need at least p+1 points");
    if (binomial(l, p) > 3e8)
        throw SpecError("convex_hull_halfspaces: subset count too large for this "
                        "dimension; reduce the point count");

    // Reject affinely dependent input (needs a smaller q downstream).
    {
        Mat centered = points.colwise() - Vec(points.rowwise().mean());
        Eigen::JacobiSVD<Mat> svd(centered);
        double s1 = svd.singularValues()[0];
        double sp = svd.singularValues()[p - 1];
        if (!(s1 > 0) || sp < 1e-9 * s1)
            throw SpecError("convex_hull_halfspaces: points are (near) affinely "
                            "dependent; the data spans fewer than p dimensions — "
                            "consider a smaller q");
    }

    const double scale = std::max(1.0, points.cwiseAbs().maxCoeff());
    const double tol = 1e-9 * scale;

    std::vector<Vec> normals;
    std::vector<double> offsets;
    auto add_facet = [&](const Vec& b, double hh) {
        for (size_t f = 0; f < normals.size(); ++f) {
            if ((normals[f] - b).cwiseAbs().maxCoeff() < 1e-7 &&
                std::abs(offsets[f] - hh) < 1e-7 * std::max(1.0, std::abs(hh)))
                return;
        }
        normals.push_back(b);
        offsets.push_back(hh);
    };

    // Enumerate p-point subsets; a subset spans a facet iff its hyperplane
    // supports the whole point set. Early exit once both sides are seen.
    std::vector<int> idx(p);
    for (int i = 0; i < p; ++i) idx[i] = i;
    Mat sub(p, p);
    while (true) {
        for (int i = 0; i < p; ++i) sub.col(i) = points.col(idx[i]);
        Vec n = hyperplane_normal(sub);
        double nn = n.norm();
        if (nn > 1e-12 * std::pow(scale, p - 1)) {
            n /= nn;
            double hh = n.dot(sub.col(0));
            bool above = false, below = false;
            for (int j = 0; j < l && !(above && below); ++j) {
                double s = n.dot(points.col(j)) - hh;
                if (s > tol) above = true;
                else if (s < -tol) below = true;
            }
            if (!above) add_facet(n, hh);
            else if (!below) add_facet(-n, -hh);
        }
        // next combination
        int i = p - 1;
        while (i >= 0 && idx[i] == l - p + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < p; ++j) idx[j] = idx[j - 1] + 1;
    }

    if (normals.empty()) throw SpecError("convex_hull_halfspaces: no facets found");
    Mat B(normals.size(), p);
    Vec h(normals.size());
    for (size_t f = 0; f < normals.size(); ++f) {
        B.row(f) = normals[f].transpose();
        h[f] = offsets[f];
    }
    return HPolytope(std::move(B), std::move(h));
}

std::pair<Vec, double> chebyshev_center(const HPolytope& poly) {
    const int p = poly.dim;
    const int H = poly.facet_count();
    // max r  s.t.  b_i'c + r <= h_i, r >= 0   (b_i are unit norm)
    LpProblem lp;
    lp.c = Vec::Zero(p + 1);
    lp.c[p] = -1.0;
    lp.Ain.resize(H, p + 1);
    lp.Ain.leftCols(p) = poly.B;
    lp.Ain.col(p).setOnes();
    lp.bin = poly.h;
    lp.nonneg.assign(p + 1, false);
    lp.nonneg[p] = true;
    LpSolution sol = lp_solve(lp);
    if (sol.status != LpStatus::Optimal)
        throw SpecError("chebyshev_center: LP failed");
    return {sol.x.head(p), sol.x[p]};
}

Ellipsoid lje(const HPolytope& poly, double tol) {
    const int p = poly.dim;
    const int H = poly.facet_count();
    auto [center, radius] = chebyshev_center(poly);
    if (!(radius > 1e-12))
        throw SpecError("lje: polytope has empty interior");

    // Symmetric-direction basis for F.
    struct Dir { int i, j; };
    std::vector<Dir> dirs;
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) dirs.push_back({i, j});
    const int nF = static_cast<int>(dirs.size());
    const int nv = nF + p;

    Mat F = (radius / 2.0) * Mat::Identity(p, p);
    Vec c = center;

    auto slacks = [&](const Mat& Fm, const Vec& cv, Vec& d, Vec& g, Mat& M) {
        M = Fm * poly.B.transpose();  // columns m_i = F b_i
        d = poly.h - poly.B * cv;
        g.resize(H);
        for (int i = 0; i < H; ++i) g[i] = d[i] * d[i] - M.col(i).squaredNorm();
    };
    auto feasible = [&](const Mat& Fm, const Vec& cv) {
        Eigen::LLT<Mat> llt(Fm);
        if (llt.info() != Eigen::Success) return false;
        Vec d, g;
        Mat M;
        slacks(Fm, cv, d, g, M);
        return (d.array() > 0).all() && (g.array() > 0).all();
    };
    auto barrier = [&](const Mat& Fm, const Vec& cv, double t) {
        Eigen::LLT<Mat> llt(Fm);
        double logdet = 0;
        for (int i = 0; i < p; ++i) logdet += std::log(llt.matrixL()(i, i));
        logdet *= 2.0;
        Vec d, g;
        Mat M;
        slacks(Fm, cv, d, g, M);
        double s = 0;
        for (int i = 0; i < H; ++i) s += std::log(g[i]);
        return -t * logdet - s;
    };

    const double nu = 2.0 * H;  // total barrier parameter
    double t = 1.0;
    const double mu = 10.0;
    int newton_total = 0;
    const int newton_cap = 200;
    double decrement = 0;

    while (true) {
        for (int inner = 0; inner < 50; ++inner) {
            if (++newton_total > newton_cap)
                throw SpecError("lje: no convergence after iteration cap; residual " +
                                std::to_string(decrement));
            Eigen::LLT<Mat> llt(F);
            Mat Finv = llt.solve(Mat::Identity(p, p));
            Vec d, g;
            Mat M;
            slacks(F, c, d, g, M);

            // Per-direction contractions u_a = V_a b_i handled through index
            // arithmetic: (V_{ij} b)[k] = b_j [k==i] + b_i [k==j] (i<j), and
            // b_i e_i for the diagonal.
            std::vector<Mat> basis(nF), FinvV(nF);
            for (int a = 0; a < nF; ++a) {
                auto [ai, aj] = dirs[a];
                Mat V = Mat::Zero(p, p);
                V(ai, aj) = 1.0;
                V(aj, ai) = 1.0;
                basis[a] = V;
                FinvV[a] = Finv * V;
            }
            Vec grad = Vec::Zero(nv);
            Mat Hess = Mat::Zero(nv, nv);
            for (int a = 0; a < nF; ++a) {
                grad[a] = -t * FinvV[a].trace();
                for (int b = a; b < nF; ++b) {
                    Hess(a, b) = t * (FinvV[a] * FinvV[b]).trace();
                    Hess(b, a) = Hess(a, b);
                }
            }
            Mat U(p, nF);  // u_a = V_a b for the current facet, filled per facet
            Vec w(nv);
            for (int i = 0; i < H; ++i) {
                const Vec b = poly.B.row(i).transpose();
                const Vec m = M.col(i);
                for (int a = 0; a < nF; ++a) {
                    auto [ai, aj] = dirs[a];
                    Vec u = Vec::Zero(p);
                    if (ai == aj) u[ai] = b[ai];
                    else { u[ai] = b[aj]; u[aj] = b[ai]; }
                    U.col(a) = u;
                    w[a] = -2.0 * m.dot(u);
                }
                w.tail(p) = -2.0 * d[i] * b;
                grad.head(nF) -= w.head(nF) / g[i];           // +2 m'V_a b / g
                grad.tail(p) -= w.tail(p) / g[i];             // +2 d b / g
                Hess.topLeftCorner(nF, nF) += (2.0 / g[i]) * (U.transpose() * U);
                Hess.bottomRightCorner(p, p) -= (2.0 / g[i]) * (b * b.transpose());
                Hess += (w * w.transpose()) / (g[i] * g[i]);
            }

            Eigen::LDLT<Mat> ldlt(Hess);
            Vec step = ldlt.solve(-grad);
            if (ldlt.info() != Eigen::Success || !step.allFinite()) {
                Hess += 1e-10 * Mat::Identity(nv, nv);
                step = Hess.ldlt().solve(-grad);
            }
            decrement = -grad.dot(step);
            if (decrement < 1e-12) break;

            Mat dF = Mat::Zero(p, p);
            for (int a = 0; a < nF; ++a) {
                auto [ai, aj] = dirs[a];
                dF(ai, aj) += step[a];
                if (ai != aj) dF(aj, ai) += step[a];
            }
            Vec dc = step.tail(p);

            double psi0 = barrier(F, c, t);
            double s = 1.0;
            while (s > 1e-12) {
                Mat Fn = F + s * dF;
                Vec cn = c + s * dc;
                if (feasible(Fn, cn) &&
                    barrier(Fn, cn, t) <= psi0 + 0.25 * s * grad.dot(step)) {
                    F = Fn;
                    c = cn;
                    break;
                }
                s *= 0.5;
            }
            if (s <= 1e-12) break;
        }
        if (nu / t < tol) break;
        t *= mu;
    }
    return Ellipsoid((F + F.transpose()) / 2.0, c);
}

Mat unit_volume_regular_simplex(int q) {
    if (q < 2) throw SpecError("unit_volume_regular_simplex: need q >= 2");
    const int p = q - 1;
    // Helmert basis of the sum-zero subspace of R^q.
    Mat B(q, p);
    B.setZero();
    for (int j = 1; j <= p; ++j) {
        double s = 1.0 / std::sqrt(static_cast<double>(j) * (j + 1));
        for (int i = 0; i < j; ++i) B(i, j - 1) = s;
        B(j, j - 1) = -static_cast<double>(j) * s;
    }
    Mat U = Mat::Identity(q, q) - Mat::Constant(q, q, 1.0 / q);
    Mat S0 = B.transpose() * U;  // p x q, pairwise vertex distance sqrt(2)
    // Scale edge length so the (q-1)-volume is 1:
    // V = s^p / p! * sqrt((p+1)/2^p)
    double logfact = 0;
    for (int i = 2; i <= p; ++i) logfact += std::log(static_cast<double>(i));
    double log_s = (logfact + 0.5 * (p * std::log(2.0) - std::log(p + 1.0))) / p;
    double edge = std::exp(log_s);
    S0 *= edge / std::sqrt(2.0);
    return S0;
}

double simplex_scale_alpha(int q) {
    if (q < 2) throw SpecError("simplex_scale_alpha: need q >= 2");
    const int p = q - 1;
    Mat S0 = unit_volume_regular_simplex(q);
    double edge = (S0.col(0) - S0.col(1)).norm();
    double inradius = edge / std::sqrt(2.0 * p * (p + 1));
    return 1.0 / inradius;
}

Mat precondition(const Mat& X, const Ellipsoid& e) {
    Eigen::LLT<Mat> llt(e.F);
    return llt.solve(X.colwise() - e.c);
}

Vec precondition(const Vec& v, const Ellipsoid& e) {
    Eigen::LLT<Mat> llt(e.F);
    return llt.solve(v - e.c);
}

}  // namespace hyperion
