#ifndef HYPERION_TYPES_HPP
#define HYPERION_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hyperion {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;

// Unit conventions used throughout: frequency in THz, time in ps,
// thickness in mm, absorption coefficients in cm^-1.
constexpr double kMmPerCm = 10.0;

// Default analysis band, THz.
constexpr double kBandLoThz = 0.2;
constexpr double kBandHiThz = 1.75;

class SpecError : public std::runtime_error {
public:
    explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

/// Uniform frequency grid f_n = f_start + n * f_step, n = 0..k-1 (THz).
struct FrequencyGrid {
    double f_start = kBandLoThz;
    double f_step = 0.01;
    int k = 156;

    FrequencyGrid() = default;
    FrequencyGrid(double start, double step, int bands);

    double freq(int i) const { return f_start + f_step * i; }
    Vec freqs() const;
    bool operator==(const FrequencyGrid&) const = default;
};

/// Grid equality up to roundoff (CSV round trips perturb f_step in the ulps).
bool grids_match(const FrequencyGrid& a, const FrequencyGrid& b, double tol = 1e-9);

/// Real time-domain trace sampled at t_n = n * t_step (ps).
struct TimeTrace {
    double t_step = 0.05;
    std::vector<double> samples;

    TimeTrace() = default;
    TimeTrace(double step, std::vector<double> values);

    int size() const { return static_cast<int>(samples.size()); }
    double nyquist_thz() const { return 0.5 / t_step; }
};

struct SampleSpectrum {
    CVec spectrum;       // complex spectrum on the shared grid
    double thickness_mm = 0;
    std::string label;
};

/// Raw measurable: reference spectrum plus per-sample spectra with thickness.
struct SpectrumSet {
    FrequencyGrid grid;
    CVec reference;
    std::vector<SampleSpectrum> samples;

    SpectrumSet() = default;
    SpectrumSet(FrequencyGrid g, CVec ref, std::vector<SampleSpectrum> smp);

    int bands() const { return grid.k; }
    int sample_count() const { return static_cast<int>(samples.size()); }
    void validate() const;
};

/// Standardized data: columns x_n = Z_n / l_n in cm^-1, l_n = d_n/2 (mm kept
/// alongside for bookkeeping; the cm conversion happens in standardize()).
struct StandardizedData {
    FrequencyGrid grid;
    Mat X;                              // k x l
    std::vector<double> half_thicknesses_mm;
    std::vector<std::string> labels;

    int bands() const { return static_cast<int>(X.rows()); }
    int sample_count() const { return static_cast<int>(X.cols()); }
};

/// Per-material absorption signatures, columns in cm^-1.
struct SignatureSet {
    FrequencyGrid grid;
    Mat S;                              // k x q
    std::vector<std::string> labels;

    int bands() const { return static_cast<int>(S.rows()); }
    int materials() const { return static_cast<int>(S.cols()); }
    void validate() const;
};

/// Nonnegative column-stochastic mixing proportions, q x l.
class AbundanceMatrix {
public:
    AbundanceMatrix() = default;
    // Validates: entries >= -1e-12 (tiny negatives clamped to 0), column
    // sums within 1e-9 of 1.
    explicit AbundanceMatrix(Mat t);

    const Mat& matrix() const { return T_; }
    int materials() const { return static_cast<int>(T_.rows()); }
    int sample_count() const { return static_cast<int>(T_.cols()); }

    static constexpr double kColumnSumTol = 1e-9;
    static constexpr double kNegativityTol = -1e-12;

private:
    Mat T_;
};

}  // namespace hyperion

#endif
