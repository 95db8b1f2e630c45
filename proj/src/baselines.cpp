#include "hyperion/baselines.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "hyperion/rng.hpp"

namespace hyperion {

namespace {

// Exact nonnegative least squares per column by support enumeration (rank is
// small here). Each half step is the true block minimizer, so D can only
// decrease.
Mat nnls_cols(const Mat& W, const Mat& X) {
    const int r = static_cast<int>(W.cols());
    if (r > 16) throw SpecError("nmf_als: rank > 16 not supported");
    const Mat G = W.transpose() * W;
    const Mat WtX = W.transpose() * X;
    Mat H(r, X.cols());
    for (int n = 0; n < X.cols(); ++n) {
        Vec best = Vec::Zero(r);
        double best_obj = X.col(n).squaredNorm();  // empty support
        for (unsigned mask = 1; mask < (1u << r); ++mask) {
            int m = 0;
            for (int j = 0; j < r; ++j)
                if (mask & (1u << j)) ++m;
            Mat Gs(m, m);
            Vec bs(m);
            int ri = 0;
            for (int i = 0; i < r; ++i) {
                if (!(mask & (1u << i))) continue;
                int ci = 0;
                for (int j = 0; j < r; ++j)
                    if (mask & (1u << j)) Gs(ri, ci++) = G(i, j);
                bs(ri++) = WtX(i, n);
            }
            Eigen::LDLT<Mat> ldlt(Gs);
            if (ldlt.info() != Eigen::Success) continue;
            Vec hs = ldlt.solve(bs);
            if ((hs.array() < 0).any()) continue;
            Vec h = Vec::Zero(r);
            ri = 0;
            for (int j = 0; j < r; ++j)
                if (mask & (1u << j)) h(j) = hs(ri++);
            double obj = X.col(n).squaredNorm() - 2.0 * h.dot(WtX.col(n)) +
                         h.dot(G * h);
            if (obj < best_obj - 1e-14 * std::max(1.0, best_obj)) {
                best_obj = obj;
                best = h;
            }
        }
        H.col(n) = best;
    }
    return H;
}

double nmf_rmse(const Mat& X, const Mat& W, const Mat& H) {
    return (X - W * H).norm() / std::sqrt(static_cast<double>(X.rows()) * X.cols());
}

}  // namespace

NmfResult nmf_als(const Mat& X, int rank, const NmfConfig& cfg) {
    if ((X.array() < 0).any()) throw SpecError("nmf_als: X has a negative entry");
    if (rank < 1 || rank > std::min(X.rows(), X.cols()))
        throw SpecError("nmf_als: rank out of range");
    if (cfg.trials < 1) throw SpecError("nmf_als: need trials >= 1");

    NmfResult best;
    best.D = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < cfg.trials; ++trial) {
        Rng rng(cfg.seed + static_cast<std::uint64_t>(trial));
        Mat W(X.rows(), rank), H(rank, X.cols());
        for (int i = 0; i < W.size(); ++i) W.data()[i] = rng.uniform();
        for (int i = 0; i < H.size(); ++i) H.data()[i] = rng.uniform();

        double d = nmf_rmse(X, W, H);
        std::vector<double> trace{d};
        for (int it = 0; it < cfg.max_iters; ++it) {
            H = nnls_cols(W, X);
            W = nnls_cols(H.transpose(), X.transpose()).transpose();
            double dn = nmf_rmse(X, W, H);
            trace.push_back(dn);
            if (dn > d - 1e-12 * std::max(1.0, d)) {
                d = std::min(d, dn);
                break;  // converged (exact half steps cannot go uphill)
            }
            d = dn;
        }
        if (d < best.D) {
            best.W = W;
            best.H = H;
            best.D = d;
            best.best_trial = trial;
            best.d_trace = std::move(trace);
        }
    }
    return best;
}

std::vector<int> spa(const Mat& X, int q) {
    if (X.cols() < q) throw SpecError("spa: need at least q columns");
    if (q < 1) throw SpecError("spa: need q >= 1");
    Mat R = X;
    const double scale = std::max(1e-300, X.norm());
    std::vector<int> picked;
    for (int step = 0; step < q; ++step) {
        int best = -1;
        double best_norm = -1;
        for (int j = 0; j < R.cols(); ++j) {
            double n = R.col(j).norm();
            if (n > best_norm + 1e-12 * scale) {
                best_norm = n;
                best = j;
            }
        }
        if (best < 0 || best_norm < 1e-12 * scale)
            throw SpecError("spa: rank collapsed after " + std::to_string(step) +
                            " selections");
        picked.push_back(best);
        Vec u = R.col(best) / best_norm;
        R -= u * (u.transpose() * R);
    }
    return picked;
}

}  // namespace hyperion
