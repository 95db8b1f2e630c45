#include "hyperion/preprocess.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/SVD>

namespace hyperion {

namespace detail {

void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
    const size_t n = a.size();
    if (n == 0 || (n & (n - 1)))
        throw SpecError("fft_radix2: size must be a power of two");
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        double ang = 2 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1 : -1);
        std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (size_t j = 0; j < len / 2; ++j) {
                auto u = a[i + j];
                auto v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

std::complex<double> dft_bin(const std::vector<double>& x, int j) {
    const long long n = static_cast<long long>(x.size());
    std::complex<double> acc(0.0);
    for (long long t = 0; t < n; ++t) {
        long long m = (static_cast<long long>(j) * t) % n;
        double ang = -2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
        acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    return acc;
}

}  // namespace detail

CVec fft_spectrum(const TimeTrace& trace, const FrequencyGrid& grid) {
    const int n = trace.size();
    const double df = 1.0 / (n * trace.t_step);  // THz
    const double f_max = grid.freq(grid.k - 1);
    if (f_max > trace.nyquist_thz())
        throw SpecError("fft_spectrum: grid exceeds trace Nyquist frequency");

    const bool pow2 = (n & (n - 1)) == 0;
    std::vector<std::complex<double>> bins;
    if (pow2) {
        bins.assign(trace.samples.begin(), trace.samples.end());
        detail::fft_radix2(bins, false);
    }
    CVec out(grid.k);
    for (int i = 0; i < grid.k; ++i) {
        int j = static_cast<int>(std::lround(grid.freq(i) / df));
        if (j < 0) j = 0;
        if (j > n / 2) j = n / 2;
        out[i] = pow2 ? bins[j] : detail::dft_bin(trace.samples, j);
    }
    return out;
}

Vec transfer_magnitude(const CVec& sample, const CVec& reference) {
    if (sample.size() != reference.size())
        throw SpecError("transfer_magnitude: length mismatch");
    Vec h(sample.size());
    for (int i = 0; i < sample.size(); ++i) {
        double r = std::abs(reference[i]);
        if (!(r > 0))
            throw SpecError("transfer_magnitude: zero reference magnitude at band " +
                            std::to_string(i));
        h[i] = std::abs(sample[i]) / r;
    }
    return h;
}

Vec absorption_spectrum(const Vec& transfer, double thickness_mm) {
    if (!(thickness_mm > 0)) throw SpecError("absorption_spectrum: need d > 0");
    const double d_cm = thickness_mm / kMmPerCm;
    Vec a(transfer.size());
    for (int i = 0; i < transfer.size(); ++i) {
        if (!(transfer[i] > 0))
            throw SpecError("absorption_spectrum: nonpositive transfer at band " +
                            std::to_string(i));
        a[i] = -(2.0 / d_cm) * std::log(transfer[i]);
    }
    return a;
}

StandardizedData standardize(const SpectrumSet& set) {
    set.validate();
    StandardizedData out;
    out.grid = set.grid;
    out.X.resize(set.bands(), set.sample_count());
    for (int n = 0; n < set.sample_count(); ++n) {
        const auto& s = set.samples[n];
        Vec h = transfer_magnitude(s.spectrum, set.reference);
        // x_n = -log|H| / l_n with l_n in cm; equals the sample absorption
        // spectrum under the neglected-interface model.
        out.X.col(n) = absorption_spectrum(h, s.thickness_mm);
        out.half_thicknesses_mm.push_back(s.thickness_mm / 2.0);
        out.labels.push_back(s.label);
    }
    return out;
}

AffineFit affine_fit(const Mat& X, int q) {
    if (q < 2) throw SpecError("affine_fit: need q >= 2");
    const int l = static_cast<int>(X.cols());
    if (l < q)
        throw SpecError("affine_fit: need at least q=" + std::to_string(q) +
                        " samples, got " + std::to_string(l));
    AffineFit fit;
    fit.mean = X.rowwise().mean();
    Mat centered = X.colwise() - fit.mean;
    Eigen::BDCSVD<Mat> svd(centered, Eigen::ComputeThinU);
    fit.basis = svd.matrixU().leftCols(q - 1);
    // Fix SVD sign ambiguity for reproducibility.
    for (int j = 0; j < fit.basis.cols(); ++j) {
        int idx;
        fit.basis.col(j).cwiseAbs().maxCoeff(&idx);
        if (fit.basis(idx, j) < 0) fit.basis.col(j) *= -1.0;
    }
    fit.projected = fit.basis.transpose() * centered;
    return fit;
}

AffineFit affine_fit(const StandardizedData& data, int q) {
    return affine_fit(data.X, q);
}

Vec alpha_max(const Vec& dynamic_range, double thickness_mm) {
    if (!(thickness_mm > 0)) throw SpecError("alpha_max: need d > 0");
    const double d_cm = thickness_mm / kMmPerCm;
    Vec a(dynamic_range.size());
    for (int i = 0; i < dynamic_range.size(); ++i) {
        if (dynamic_range[i] < 1.0)
            throw SpecError("alpha_max: dynamic range < 1 at band " + std::to_string(i));
        a[i] = (2.0 / d_cm) * std::log(dynamic_range[i]);
    }
    return a;
}

}  // namespace hyperion
