#include "hyperion/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/SVD>

namespace hyperion {

double sam_degrees(const Vec& s1, const Vec& s2) {
    if (s1.size() != s2.size()) throw SpecError("sam_degrees: length mismatch");
    double n1 = s1.norm(), n2 = s2.norm();
    if (!(n1 > 0) || !(n2 > 0)) throw SpecError("sam_degrees: zero-norm spectrum");
    double c = s1.dot(s2) / (n1 * n2);
    c = std::clamp(c, -1.0, 1.0);
    return std::acos(c) * 180.0 / std::numbers::pi;
}

double rmse(const Vec& s1, const Vec& s2) {
    if (s1.size() != s2.size()) throw SpecError("rmse: length mismatch");
    if (s1.size() == 0) throw SpecError("rmse: empty spectra");
    return std::sqrt((s1 - s2).squaredNorm() / static_cast<double>(s1.size()));
}

Alignment align_signatures(const Mat& est, const Mat& truth) {
    const int q = static_cast<int>(truth.cols());
    if (est.cols() != q) throw SpecError("align_signatures: q mismatch");
    if (est.rows() != truth.rows()) throw SpecError("align_signatures: grid mismatch");
    if (q > 8) throw SpecError("align_signatures: q > 8 not supported");

    Mat sam(q, q);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) sam(i, j) = sam_degrees(est.col(i), truth.col(j));

    std::vector<int> perm(q), best(q);
    std::iota(perm.begin(), perm.end(), 0);
    double best_mean = std::numeric_limits<double>::infinity();
    do {
        double total = 0;
        for (int j = 0; j < q; ++j) total += sam(perm[j], j);
        if (total < best_mean - 1e-15) {
            best_mean = total;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    Alignment a;
    a.permutation = best;
    for (int j = 0; j < q; ++j) {
        a.sam_deg.push_back(sam(best[j], j));
        a.rmse_cm.push_back(rmse(est.col(best[j]), truth.col(j)));
    }
    a.mean_sam = std::accumulate(a.sam_deg.begin(), a.sam_deg.end(), 0.0) / q;
    a.mean_rmse = std::accumulate(a.rmse_cm.begin(), a.rmse_cm.end(), 0.0) / q;
    return a;
}

Alignment align_signatures(const SignatureSet& est, const SignatureSet& truth) {
    if (!grids_match(est.grid, truth.grid))
        throw SpecError("align_signatures: grid mismatch");
    return align_signatures(est.S, truth.S);
}

double snr_db(double signal_power, double noise_power) {
    if (!(noise_power > 0)) throw SpecError("snr_db: noise power must be > 0");
    if (!(signal_power > noise_power))
        throw SpecError("snr_db: signal power must exceed noise power");
    return 10.0 * std::log10((signal_power - noise_power) / noise_power);
}

Mat pca_project_2d(const Mat& X, const std::vector<int>& fit_on) {
    if (fit_on.size() < 3) throw SpecError("pca_project_2d: need >= 3 fit columns");
    Mat fit(X.rows(), fit_on.size());
    for (size_t i = 0; i < fit_on.size(); ++i) fit.col(i) = X.col(fit_on[i]);
    Vec mean = fit.rowwise().mean();
    Mat centered = fit.colwise() - mean;
    Eigen::BDCSVD<Mat> svd(centered, Eigen::ComputeThinU);
    Mat basis = svd.matrixU().leftCols(2);
    for (int j = 0; j < 2; ++j) {
        int idx;
        basis.col(j).cwiseAbs().maxCoeff(&idx);
        if (basis(idx, j) < 0) basis.col(j) *= -1.0;
    }
    return basis.transpose() * (X.colwise() - mean);
}

}  // namespace hyperion
