#include "hyperion/types.hpp"

#include <cmath>

namespace hyperion {

FrequencyGrid::FrequencyGrid(double start, double step, int bands)
    : f_start(start), f_step(step), k(bands) {
    if (f_step <= 0) throw SpecError("FrequencyGrid: f_step must be > 0");
    if (k < 2) throw SpecError("FrequencyGrid: need at least 2 bands");
}

Vec FrequencyGrid::freqs() const {
    Vec f(k);
    for (int i = 0; i < k; ++i) f[i] = freq(i);
    return f;
}

bool grids_match(const FrequencyGrid& a, const FrequencyGrid& b, double tol) {
    return a.k == b.k && std::abs(a.f_start - b.f_start) <= tol &&
           std::abs(a.freq(a.k - 1) - b.freq(b.k - 1)) <= tol;
}

TimeTrace::TimeTrace(double step, std::vector<double> values)
    : t_step(step), samples(std::move(values)) {
    if (t_step <= 0) throw SpecError("TimeTrace: t_step must be > 0");
    if (samples.size() < 2) throw SpecError("TimeTrace: need at least 2 samples");
    for (double v : samples)
        if (!std::isfinite(v)) throw SpecError("TimeTrace: non-finite sample");
}

SpectrumSet::SpectrumSet(FrequencyGrid g, CVec ref, std::vector<SampleSpectrum> smp)
    : grid(g), reference(std::move(ref)), samples(std::move(smp)) {
    validate();
}

void SpectrumSet::validate() const {
    if (reference.size() != grid.k)
        throw SpecError("SpectrumSet: reference length does not match grid");
    for (size_t n = 0; n < samples.size(); ++n) {
        if (samples[n].spectrum.size() != grid.k)
            throw SpecError("SpectrumSet: sample " + std::to_string(n) +
                            " has inconsistent band count");
        if (!(samples[n].thickness_mm > 0))
            throw SpecError("SpectrumSet: sample " + std::to_string(n) +
                            " has nonpositive thickness");
    }
}

void SignatureSet::validate() const {
    if (materials() < 2) throw SpecError("SignatureSet: need q >= 2");
    if (bands() != grid.k) throw SpecError("SignatureSet: band count mismatch");
    if (!S.allFinite()) throw SpecError("SignatureSet: non-finite entry");
}

AbundanceMatrix::AbundanceMatrix(Mat t) : T_(std::move(t)) {
    for (int j = 0; j < T_.cols(); ++j) {
        double sum = T_.col(j).sum();
        if (std::abs(sum - 1.0) > kColumnSumTol)
            throw SpecError("AbundanceMatrix: column " + std::to_string(j) +
                            " sums to " + std::to_string(sum) + ", expected 1");
        for (int i = 0; i < T_.rows(); ++i) {
            double v = T_(i, j);
            if (v < kNegativityTol)
                throw SpecError("AbundanceMatrix: negative entry at (" +
                                std::to_string(i) + "," + std::to_string(j) + ")");
            if (v < 0) T_(i, j) = 0;
        }
    }
}

}  // namespace hyperion
