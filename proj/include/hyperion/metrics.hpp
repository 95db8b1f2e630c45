#ifndef HYPERION_METRICS_HPP
#define HYPERION_METRICS_HPP

#include "hyperion/types.hpp"

namespace hyperion {

/// Spectral angle between two spectra, degrees. Scale invariant.
double sam_degrees(const Vec& s1, const Vec& s2);

/// sqrt(||s1 - s2||^2 / n).
double rmse(const Vec& s1, const Vec& s2);

struct Alignment {
    std::vector<int> permutation;  // est column matched to true column j
    std::vector<double> sam_deg;   // per true signature
    std::vector<double> rmse_cm;   // per true signature
    double mean_sam = 0;
    double mean_rmse = 0;
};

/// Match estimated to true signatures by exhaustive permutation search
/// minimizing mean SAM (q <= 8).
Alignment align_signatures(const SignatureSet& est, const SignatureSet& truth);
Alignment align_signatures(const Mat& est, const Mat& truth);

/// 10 log10((P(S) - P(N)) / P(N)).
double snr_db(double signal_power, double noise_power);

/// Top-2 principal plane of the fit_on columns; all columns projected on it.
Mat pca_project_2d(const Mat& X, const std::vector<int>& fit_on);

}  // namespace hyperion

#endif
