#ifndef HYPERION_SYNTH_HPP
#define HYPERION_SYNTH_HPP

#include <array>

#include "hyperion/types.hpp"

namespace hyperion {

struct LineSpec {
    double center = 0;      // THz
    double half_width = 0;  // THz
    double peak = 0;        // cm^-1
};

struct MaterialSpec {
    std::string label;
    std::vector<LineSpec> lines;
    double baseline = 0;  // cm^-1
    double slope = 0;     // cm^-1 per THz, relative to the band start
};

struct NoiseSpec {
    double sd_percent = 0;    // % of single-trace peak-to-peak amplitude
    int traces_averaged = 1;  // averaging reduces the sd by sqrt(n)
};

struct SampleDesign {
    std::string label;
    double d_total_mm = 0;
    std::vector<double> weights;  // on the simplex, one per material
};

struct Scenario {
    FrequencyGrid grid;
    double t_step = 100.0 / 2048;  // ps; aligns the DFT bins with the default grid
    int n = 2048;                  // power of two
    NoiseSpec noise;
    std::uint64_t seed = 0;
    double water_vapor_strength = 0;  // cm^-1
    std::vector<MaterialSpec> materials;
    std::vector<SampleDesign> samples;
};

struct SynthDataset {
    SpectrumSet spectra;
    SignatureSet truth_signatures;
    AbundanceMatrix truth_abundances;
};

/// alpha(f) = baseline + slope (f - f_start) + sum of Lorentzian lines,
/// clamped at 0.
Vec make_signature(const MaterialSpec& spec, const FrequencyGrid& grid);
double signature_at(const MaterialSpec& spec, double f_thz, double f_start_thz);

/// Derivative-of-Gaussian probe pulse (sigma = 0.1 ps), unit peak, centered so
/// the samples sum to zero exactly. Errors if the magnitude spectrum dips
/// below 1e-6 of its peak anywhere on 0.2-1.75 THz.
TimeTrace reference_pulse(double t_step = 0.05, int n = 2048);

/// Y(f) = X(f) prod_i exp(-alpha_i(f) d_i / 2) on the grid, with d_i converted
/// mm -> cm; X is the pulse spectrum. Amplitude-only: phase untouched.
CVec forward_mix(const std::vector<MaterialSpec>& materials,
                 const std::vector<double>& thicknesses_mm,
                 const TimeTrace& pulse, const FrequencyGrid& grid);

/// i.i.d. Gaussian noise, sd = (sd_percent/100) p2p / sqrt(traces_averaged).
TimeTrace add_awgn(const TimeTrace& trace, const NoiseSpec& spec,
                   std::uint64_t rng_seed);

/// The 11 strongest water vapor lines on the band, THz.
extern const std::array<double, 11> kWaterVaporLinesThz;

/// Scales |Y| by exp(-strength L(f) / 2) with L a narrow Lorentzian comb at
/// the water vapor lines; phase untouched.
CVec water_vapor_overlay(const CVec& Y, const FrequencyGrid& grid, double strength);

/// Full generator: per-sample layer thicknesses d_i = w_i d_total, forward
/// propagation on all DFT bins, time-domain AWGN (derived seeds), nearest-bin
/// spectra, ground truth attached.
SynthDataset build_dataset(const Scenario& scenario);

/// Key-value scenario config; errors are reported as "scenario:LINE: msg".
Scenario parse_scenario(const std::string& text);
std::string format_scenario(const Scenario& scenario);

// Canned materials/designs used by the experiments and tests.
std::vector<MaterialSpec> default_materials(int q);
Scenario ternary_pures_scenario(const NoiseSpec& noise = {}, std::uint64_t seed = 0);
Scenario quinary_pairs_scenario(double w_major = 0.5, const NoiseSpec& noise = {},
                                std::uint64_t seed = 0);
Scenario composition_test_scenario(const NoiseSpec& noise = {},
                                   std::uint64_t seed = 0);

}  // namespace hyperion

#endif
