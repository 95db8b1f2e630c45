#ifndef HYPERION_PREPROCESS_HPP
#define HYPERION_PREPROCESS_HPP

#include "hyperion/types.hpp"

namespace hyperion {

struct AffineFit {
    Vec mean;        // k
    Mat basis;       // k x (q-1), orthonormal columns
    Mat projected;   // (q-1) x l
};

/// DFT of the trace sampled at the grid frequencies by nearest-bin selection
/// (no zero padding, no window, no interpolation).
CVec fft_spectrum(const TimeTrace& trace, const FrequencyGrid& grid);

/// |H(f)| = |sample| / |reference| per band.
Vec transfer_magnitude(const CVec& sample, const CVec& reference);

/// alpha(f) = -(2/d) ln H(f), d in mm, result in cm^-1.
Vec absorption_spectrum(const Vec& transfer, double thickness_mm);

/// Columns x_n = -log(|Y_n|/|X|) / l_n with l_n = d_n/2 (cm), in cm^-1.
StandardizedData standardize(const SpectrumSet& set);

/// Best rank-(q-1) affine fit of the columns of X (SVD of the centered matrix).
AffineFit affine_fit(const StandardizedData& data, int q);
AffineFit affine_fit(const Mat& X, int q);

/// Largest detectable absorption per band given linear amplitude dynamic range.
Vec alpha_max(const Vec& dynamic_range, double thickness_mm);

// Internal DFT helpers, exposed for the synth module and oracles.
namespace detail {
/// In-place radix-2 FFT; size must be a power of two. inverse applies 1/n.
void fft_radix2(std::vector<std::complex<double>>& a, bool inverse);
/// Direct O(n) evaluation of DFT bin j of a real sequence.
std::complex<double> dft_bin(const std::vector<double>& x, int j);
}  // namespace detail

}  // namespace hyperion

#endif
