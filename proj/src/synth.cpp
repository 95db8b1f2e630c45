#include "hyperion/synth.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hyperion/preprocess.hpp"
#include "hyperion/rng.hpp"

namespace hyperion {

const std::array<double, 11> kWaterVaporLinesThz = {
    0.56, 0.75, 0.99, 1.10, 1.16, 1.21, 1.23, 1.41, 1.60, 1.66, 1.72};

namespace {

constexpr double kPulseSigmaPs = 0.1;
constexpr double kVaporHalfWidthThz = 0.005;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

void validate_material(const MaterialSpec& spec, const FrequencyGrid& grid) {
    const double f_end = grid.freq(grid.k - 1);
    for (const LineSpec& ln : spec.lines) {
        if (!(ln.half_width > 0))
            throw SpecError("MaterialSpec '" + spec.label + "': half_width must be > 0");
        if (ln.peak < 0)
            throw SpecError("MaterialSpec '" + spec.label + "': peak must be >= 0");
        if (ln.center < grid.f_start - 1e-12 || ln.center > f_end + 1e-12)
            throw SpecError("MaterialSpec '" + spec.label + "': line at " +
                            std::to_string(ln.center) + " THz is outside the grid");
    }
}

void validate_scenario(const Scenario& sc) {
    if (sc.materials.empty()) throw SpecError("scenario: no materials");
    if (sc.samples.empty()) throw SpecError("scenario: no samples");
    if (!is_pow2(sc.n) || sc.n < 64)
        throw SpecError("scenario: n must be a power of two >= 64");
    if (sc.t_step <= 0) throw SpecError("scenario: t_step must be > 0");
    if (sc.noise.sd_percent < 0 || sc.noise.traces_averaged < 1)
        throw SpecError("scenario: invalid noise spec");
    if (sc.water_vapor_strength < 0)
        throw SpecError("scenario: water_vapor strength must be >= 0");
    for (const MaterialSpec& m : sc.materials) validate_material(m, sc.grid);
    const size_t q = sc.materials.size();
    for (const SampleDesign& s : sc.samples) {
        if (!(s.d_total_mm > 0))
            throw SpecError("scenario sample '" + s.label + "': thickness must be > 0");
        if (s.weights.size() != q)
            throw SpecError("scenario sample '" + s.label + "': expected " +
                            std::to_string(q) + " weights");
        double sum = 0;
        for (double w : s.weights) {
            if (w < 0)
                throw SpecError("scenario sample '" + s.label +
                                "': weights not on simplex (negative weight)");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw SpecError("scenario sample '" + s.label +
                            "': weights not on simplex (sum " + std::to_string(sum) + ")");
    }
}

}  // namespace

double signature_at(const MaterialSpec& spec, double f_thz, double f_start_thz) {
    double a = spec.baseline + spec.slope * (f_thz - f_start_thz);
    for (const LineSpec& ln : spec.lines) {
        double df = f_thz - ln.center;
        a += ln.peak * ln.half_width * ln.half_width /
             (df * df + ln.half_width * ln.half_width);
    }
    return std::max(0.0, a);
}

Vec make_signature(const MaterialSpec& spec, const FrequencyGrid& grid) {
    validate_material(spec, grid);
    Vec alpha(grid.k);
    for (int i = 0; i < grid.k; ++i)
        alpha[i] = signature_at(spec, grid.freq(i), grid.f_start);
    return alpha;
}

TimeTrace reference_pulse(double t_step, int n) {
    if (n < 64) throw SpecError("reference_pulse: need n >= 64");
    if (t_step <= 0) throw SpecError("reference_pulse: t_step must be > 0");
    const double mid = (n - 1) / 2.0;
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) {
        double u = (i - mid) * t_step / kPulseSigmaPs;
        x[i] = -u * std::exp(0.5 - 0.5 * u * u);
    }
    TimeTrace trace(t_step, std::move(x));

    // The probe must actually illuminate the analysis band.
    if (trace.nyquist_thz() < kBandHiThz)
        throw SpecError("reference_pulse: Nyquist below " + std::to_string(kBandHiThz) +
                        " THz; decrease t_step");
    const double df = 1.0 / (n * t_step);
    std::vector<double> mag(n / 2 + 1);
    if (is_pow2(n)) {
        std::vector<std::complex<double>> a(trace.samples.begin(), trace.samples.end());
        detail::fft_radix2(a, false);
        for (int j = 0; j <= n / 2; ++j) mag[j] = std::abs(a[j]);
    } else {
        for (int j = 0; j <= n / 2; ++j)
            mag[j] = std::abs(detail::dft_bin(trace.samples, j));
    }
    double peak = *std::max_element(mag.begin(), mag.end());
    int j_lo = std::max(0, static_cast<int>(std::floor(kBandLoThz / df)));
    int j_hi = std::min(n / 2, static_cast<int>(std::ceil(kBandHiThz / df)));
    for (int j = j_lo; j <= j_hi; ++j)
        if (mag[j] < 1e-6 * peak)
            throw SpecError("reference_pulse: spectrum dips below 1e-6 of peak at " +
                            std::to_string(j * df) + " THz");
    return trace;
}

CVec forward_mix(const std::vector<MaterialSpec>& materials,
                 const std::vector<double>& thicknesses_mm,
                 const TimeTrace& pulse, const FrequencyGrid& grid) {
    if (materials.size() != thicknesses_mm.size())
        throw SpecError("forward_mix: materials/thicknesses length mismatch");
    for (double d : thicknesses_mm)
        if (d < 0) throw SpecError("forward_mix: negative thickness");
    CVec X = fft_spectrum(pulse, grid);
    CVec Y(grid.k);
    for (int i = 0; i < grid.k; ++i) {
        double exponent = 0;
        for (size_t m = 0; m < materials.size(); ++m)
            exponent += signature_at(materials[m], grid.freq(i), grid.f_start) *
                        thicknesses_mm[m] / kMmPerCm;
        Y[i] = X[i] * std::exp(-0.5 * exponent);
    }
    return Y;
}

TimeTrace add_awgn(const TimeTrace& trace, const NoiseSpec& spec,
                   std::uint64_t rng_seed) {
    if (spec.sd_percent < 0) throw SpecError("add_awgn: sd_percent must be >= 0");
    if (spec.traces_averaged < 1) throw SpecError("add_awgn: traces_averaged must be >= 1");
    if (spec.sd_percent == 0) return trace;
    auto [lo, hi] = std::minmax_element(trace.samples.begin(), trace.samples.end());
    double sd = spec.sd_percent / 100.0 * (*hi - *lo) /
                std::sqrt(static_cast<double>(spec.traces_averaged));
    Rng rng(rng_seed);
    TimeTrace out = trace;
    for (double& v : out.samples) v += sd * rng.gaussian();
    return out;
}

CVec water_vapor_overlay(const CVec& Y, const FrequencyGrid& grid, double strength) {
    if (strength < 0) throw SpecError("water_vapor_overlay: strength must be >= 0");
    if (Y.size() != grid.k) throw SpecError("water_vapor_overlay: length mismatch");
    CVec out(grid.k);
    for (int i = 0; i < grid.k; ++i) {
        double f = grid.freq(i), comb = 0;
        for (double c : kWaterVaporLinesThz) {
            double df = f - c;
            comb += kVaporHalfWidthThz * kVaporHalfWidthThz /
                    (df * df + kVaporHalfWidthThz * kVaporHalfWidthThz);
        }
        out[i] = Y[i] * std::exp(-0.5 * strength * comb);
    }
    return out;
}

SynthDataset build_dataset(const Scenario& sc) {
    validate_scenario(sc);
    const int n = sc.n;
    const double df = 1.0 / (n * sc.t_step);
    TimeTrace pulse = reference_pulse(sc.t_step, n);
    if (pulse.nyquist_thz() < sc.grid.freq(sc.grid.k - 1))
        throw SpecError("build_dataset: grid extends past Nyquist");

    std::vector<std::complex<double>> P(pulse.samples.begin(), pulse.samples.end());
    detail::fft_radix2(P, false);

    const int q = static_cast<int>(sc.materials.size());
    std::vector<SampleSpectrum> samples;
    Mat T(q, static_cast<int>(sc.samples.size()));
    for (size_t s = 0; s < sc.samples.size(); ++s) {
        const SampleDesign& d = sc.samples[s];
        // Real symmetric amplitude filter on every DFT bin keeps the inverse
        // transform real.
        std::vector<std::complex<double>> Yb(n);
        for (int j = 0; j <= n / 2; ++j) {
            double f = j * df, exponent = 0;
            for (int m = 0; m < q; ++m)
                exponent += signature_at(sc.materials[m], f, sc.grid.f_start) *
                            d.weights[m] * d.d_total_mm / kMmPerCm;
            double h = std::exp(-0.5 * exponent);
            Yb[j] = P[j] * h;
            if (j > 0 && j < n / 2) Yb[n - j] = P[n - j] * h;
        }
        detail::fft_radix2(Yb, true);
        std::vector<double> t(n);
        for (int i = 0; i < n; ++i) t[i] = Yb[i].real();
        TimeTrace trace = add_awgn(TimeTrace(sc.t_step, std::move(t)), sc.noise,
                                   sc.seed ^ static_cast<std::uint64_t>(s + 1));
        CVec spec = fft_spectrum(trace, sc.grid);
        if (sc.water_vapor_strength > 0)
            spec = water_vapor_overlay(spec, sc.grid, sc.water_vapor_strength);
        samples.push_back({spec, d.d_total_mm, d.label});
        for (int m = 0; m < q; ++m) T(m, static_cast<int>(s)) = d.weights[m];
    }
    TimeTrace ref = add_awgn(pulse, sc.noise, sc.seed);

    SynthDataset out;
    out.spectra = SpectrumSet(sc.grid, fft_spectrum(ref, sc.grid), std::move(samples));
    out.truth_signatures.grid = sc.grid;
    out.truth_signatures.S.resize(sc.grid.k, q);
    for (int m = 0; m < q; ++m) {
        out.truth_signatures.S.col(m) = make_signature(sc.materials[m], sc.grid);
        out.truth_signatures.labels.push_back(sc.materials[m].label);
    }
    out.truth_signatures.validate();
    out.truth_abundances = AbundanceMatrix(T);
    return out;
}

Scenario parse_scenario(const std::string& text) {
    Scenario sc;
    sc.grid = FrequencyGrid(kBandLoThz, 0.01, 156);
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) -> SpecError {
        return SpecError("scenario:" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        if (key == "grid") {
            double f0, step;
            int k;
            if (!(ls >> f0 >> step >> k)) throw fail("grid needs f_start f_step k");
            try {
                sc.grid = FrequencyGrid(f0, step, k);
            } catch (const SpecError& e) {
                throw fail(e.what());
            }
        } else if (key == "pulse") {
            if (!(ls >> sc.t_step >> sc.n)) throw fail("pulse needs t_step n");
        } else if (key == "noise") {
            if (!(ls >> sc.noise.sd_percent >> sc.noise.traces_averaged))
                throw fail("noise needs sd_percent traces_averaged");
        } else if (key == "seed") {
            if (!(ls >> sc.seed)) throw fail("seed needs an integer");
        } else if (key == "water_vapor") {
            if (!(ls >> sc.water_vapor_strength)) throw fail("water_vapor needs a strength");
        } else if (key == "material") {
            MaterialSpec m;
            if (!(ls >> m.label)) throw fail("material needs a label");
            std::string tok;
            while (ls >> tok) {
                if (tok == "baseline") {
                    if (!(ls >> m.baseline)) throw fail("baseline needs a value");
                } else if (tok == "slope") {
                    if (!(ls >> m.slope)) throw fail("slope needs a value");
                } else if (tok == "line") {
                    LineSpec l;
                    if (!(ls >> l.center >> l.half_width >> l.peak))
                        throw fail("line needs center half_width peak");
                    m.lines.push_back(l);
                } else {
                    throw fail("unknown material token '" + tok + "'");
                }
            }
            sc.materials.push_back(std::move(m));
        } else if (key == "sample") {
            SampleDesign d;
            if (!(ls >> d.label >> d.d_total_mm)) throw fail("sample needs label thickness");
            double w;
            while (ls >> w) d.weights.push_back(w);
            if (d.weights.empty()) throw fail("sample needs at least one weight");
            sc.samples.push_back(std::move(d));
        } else {
            throw fail("unknown directive '" + key + "'");
        }
    }
    ++lineno;
    try {
        validate_scenario(sc);
    } catch (const SpecError& e) {
        throw SpecError("scenario:" + std::to_string(lineno) + ": " + e.what());
    }
    return sc;
}

std::string format_scenario(const Scenario& sc) {
    std::ostringstream out;
    out.precision(17);
    out << "grid " << sc.grid.f_start << " " << sc.grid.f_step << " " << sc.grid.k << "\n";
    out << "pulse " << sc.t_step << " " << sc.n << "\n";
    out << "noise " << sc.noise.sd_percent << " " << sc.noise.traces_averaged << "\n";
    out << "seed " << sc.seed << "\n";
    if (sc.water_vapor_strength > 0)
        out << "water_vapor " << sc.water_vapor_strength << "\n";
    for (const MaterialSpec& m : sc.materials) {
        out << "material " << m.label << " baseline " << m.baseline << " slope " << m.slope;
        for (const LineSpec& l : m.lines)
            out << " line " << l.center << " " << l.half_width << " " << l.peak;
        out << "\n";
    }
    for (const SampleDesign& d : sc.samples) {
        out << "sample " << d.label << " " << d.d_total_mm;
        for (double w : d.weights) out << " " << w;
        out << "\n";
    }
    return out.str();
}

std::vector<MaterialSpec> default_materials(int q) {
    if (q < 2 || q > 5) throw SpecError("default_materials: q out of range [2, 5]");
    std::vector<MaterialSpec> all = {
        {"tyrosine_like", {{0.95, 0.04, 30.0}}, 2.0, 1.0},
        {"maltose_like", {{0.78, 0.05, 25.0}}, 3.0, 2.0},
        {"lactose_like", {{0.52, 0.03, 20.0}, {1.30, 0.05, 28.0}}, 1.5, 1.5},
        {"glucose_like", {{1.10, 0.06, 22.0}}, 2.5, 0.8},
        {"fructose_like", {{0.65, 0.04, 18.0}, {1.55, 0.06, 24.0}}, 2.0, 2.5},
    };
    all.resize(q);
    return all;
}

namespace {

Scenario base_scenario(int q, const NoiseSpec& noise, std::uint64_t seed) {
    Scenario sc;
    sc.grid = FrequencyGrid(kBandLoThz, 0.01, 156);
    sc.noise = noise;
    sc.seed = seed;
    sc.materials = default_materials(q);
    return sc;
}

std::string weight_tag(double w) {
    int pct = static_cast<int>(std::lround(100 * w));
    return std::to_string(pct);
}

}  // namespace

Scenario ternary_pures_scenario(const NoiseSpec& noise, std::uint64_t seed) {
    Scenario sc = base_scenario(3, noise, seed);
    const double d = 3.05;
    for (int i = 0; i < 3; ++i) {
        SampleDesign s;
        s.label = "pure_" + sc.materials[i].label;
        s.d_total_mm = d;
        s.weights = {0, 0, 0};
        s.weights[i] = 1;
        sc.samples.push_back(std::move(s));
    }
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            for (double w : {0.3, 0.7}) {
                SampleDesign s;
                s.label = "mix_" + std::to_string(i + 1) + std::to_string(j + 1) + "_" +
                          weight_tag(w);
                s.d_total_mm = d;
                s.weights = {0, 0, 0};
                s.weights[i] = w;
                s.weights[j] = 1 - w;
                sc.samples.push_back(std::move(s));
            }
    return sc;
}

Scenario quinary_pairs_scenario(double w_major, const NoiseSpec& noise,
                                std::uint64_t seed) {
    if (w_major < 0.5 || w_major >= 1)
        throw SpecError("quinary_pairs_scenario: w_major must be in [0.5, 1)");
    Scenario sc = base_scenario(5, noise, seed);
    const double d = 3.05;
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) {
            SampleDesign s;
            s.label = "mix_" + std::to_string(i + 1) + std::to_string(j + 1) + "_" +
                      weight_tag(w_major);
            s.d_total_mm = d;
            s.weights.assign(5, 0.0);
            s.weights[i] = w_major;
            s.weights[j] = 1 - w_major;
            sc.samples.push_back(std::move(s));
        }
    return sc;
}

Scenario composition_test_scenario(const NoiseSpec& noise, std::uint64_t seed) {
    Scenario sc = base_scenario(3, noise, seed);
    const double d = 3.05;
    // All ternary weight triples on the quarter grid: C(6,2) = 15 tablets.
    for (int i = 0; i <= 4; ++i)
        for (int j = 0; i + j <= 4; ++j) {
            int k = 4 - i - j;
            SampleDesign s;
            s.label = "tablet_" + std::to_string(i) + std::to_string(j) + std::to_string(k);
            s.d_total_mm = d;
            s.weights = {i / 4.0, j / 4.0, k / 4.0};
            sc.samples.push_back(std::move(s));
        }
    return sc;
}

}  // namespace hyperion
