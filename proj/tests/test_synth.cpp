#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>

#include "hyperion/preprocess.hpp"
#include "hyperion/rng.hpp"
#include "hyperion/synth.hpp"

using namespace hyperion;

namespace {

double sample_sd(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0;
    for (size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc / a.size());
}

// Root-mean-square complex deviation between two spectrum sets.
double spectral_noise_rms(const SpectrumSet& noisy, const SpectrumSet& clean) {
    double acc = 0;
    int count = 0;
    for (size_t n = 0; n < noisy.samples.size(); ++n) {
        CVec d = noisy.samples[n].spectrum - clean.samples[n].spectrum;
        acc += d.squaredNorm();
        count += static_cast<int>(d.size());
    }
    return std::sqrt(acc / count);
}

}  // namespace

TEST_CASE("make_signature") {
    FrequencyGrid grid(0.2, 0.01, 156);

    SUBCASE("baseline only") {
        MaterialSpec m{"flat", {}, 5.0, 0.0};
        Vec a = make_signature(m, grid);
        CHECK(a.minCoeff() == doctest::Approx(5.0));
        CHECK(a.maxCoeff() == doctest::Approx(5.0));
    }

    SUBCASE("single line evaluates exactly at its center") {
        MaterialSpec m{"one", {{0.95, 0.04, 30.0}}, 2.0, 1.0};
        double v = signature_at(m, 0.95, grid.f_start);
        CHECK(v == doctest::Approx(2.0 + 1.0 * (0.95 - 0.2) + 30.0));
    }

    SUBCASE("tyrosine-like argmax sits at the 0.95 THz bin") {
        MaterialSpec m = default_materials(3)[0];
        Vec a = make_signature(m, grid);
        int peak;
        a.maxCoeff(&peak);
        CHECK(grid.freq(peak) == doctest::Approx(0.95));
    }

    SUBCASE("negative contributions clamp at zero") {
        MaterialSpec m{"neg", {}, -3.0, 0.0};
        Vec a = make_signature(m, grid);
        CHECK(a.minCoeff() == 0.0);
    }
}

TEST_CASE("reference_pulse") {
    TimeTrace p = reference_pulse();

    SUBCASE("samples sum to zero") {
        double total = std::accumulate(p.samples.begin(), p.samples.end(), 0.0);
        double scale = 0;
        for (double v : p.samples) scale += std::abs(v);
        CHECK(std::abs(total) < 1e-9 * scale);
    }

    SUBCASE("band coverage at the default settings") {
        FrequencyGrid edge(1.75, 0.01, 2);
        CVec spec = fft_spectrum(p, FrequencyGrid(0.2, 0.01, 156));
        double peak = spec.cwiseAbs().maxCoeff();
        CVec hi = fft_spectrum(p, edge);
        CHECK(std::abs(hi[0]) > 1e-3 * peak);
    }

    SUBCASE("doubling n halves the DFT bin spacing") {
        TimeTrace p2 = reference_pulse(0.05, 4096);
        double df1 = 1.0 / (p.size() * p.t_step);
        double df2 = 1.0 / (p2.size() * p2.t_step);
        CHECK(df2 == doctest::Approx(0.5 * df1));
    }

    SUBCASE("uncoverable band rejected") {
        CHECK_THROWS_AS(reference_pulse(5.0, 2048), SpecError);
        CHECK_THROWS_AS(reference_pulse(0.05, 32), SpecError);
    }
}

TEST_CASE("forward_mix") {
    FrequencyGrid grid(0.2, 0.01, 156);
    TimeTrace pulse = reference_pulse();
    CVec X = fft_spectrum(pulse, grid);
    std::vector<MaterialSpec> mats = default_materials(2);

    SUBCASE("zero thickness is the identity") {
        CVec Y = forward_mix(mats, {0.0, 0.0}, pulse, grid);
        CHECK((Y - X).cwiseAbs().maxCoeff() < 1e-12 * X.cwiseAbs().maxCoeff());
    }

    SUBCASE("inverse pair recovers the signature") {
        CVec Y = forward_mix({mats[1]}, {2.6}, pulse, grid);
        Vec alpha = absorption_spectrum(transfer_magnitude(Y, X), 2.6);
        Vec truth = make_signature(mats[1], grid);
        CHECK((alpha - truth).cwiseAbs().maxCoeff() < 1e-9);
    }

    SUBCASE("equal layers standardize to the even convex combination") {
        CVec Ya = forward_mix({mats[0]}, {3.0}, pulse, grid);
        CVec Yb = forward_mix({mats[1]}, {3.0}, pulse, grid);
        CVec Yab = forward_mix(mats, {1.5, 1.5}, pulse, grid);
        SpectrumSet set(grid, X,
                        {{Ya, 3.0, "a"}, {Yb, 3.0, "b"}, {Yab, 3.0, "ab"}});
        StandardizedData data = standardize(set);
        Vec combo = 0.5 * data.X.col(0) + 0.5 * data.X.col(1);
        CHECK((data.X.col(2) - combo).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("add_awgn") {
    std::vector<double> ramp(100000);
    for (size_t i = 0; i < ramp.size(); ++i) ramp[i] = i / double(ramp.size() - 1);
    TimeTrace trace(0.05, ramp);  // peak-to-peak exactly 1

    SUBCASE("zero sd is the identity") {
        NoiseSpec spec{0.0, 1};
        TimeTrace out = add_awgn(trace, spec, 7);
        CHECK(out.samples == trace.samples);
    }

    SUBCASE("deterministic given the seed") {
        NoiseSpec spec{0.5, 1};
        TimeTrace a = add_awgn(trace, spec, 7);
        TimeTrace b = add_awgn(trace, spec, 7);
        TimeTrace c = add_awgn(trace, spec, 8);
        CHECK(a.samples == b.samples);
        CHECK(a.samples != c.samples);
    }

    SUBCASE("empirical sd within 2% of nominal") {
        NoiseSpec spec{0.5, 1};
        TimeTrace out = add_awgn(trace, spec, 3);
        double sd = sample_sd(out.samples, trace.samples);
        CHECK(sd == doctest::Approx(0.005).epsilon(0.02));
    }

    SUBCASE("0.48% over 1000 averaged traces is effectively 0.0152%") {
        NoiseSpec spec{0.48, 1000};
        TimeTrace out = add_awgn(trace, spec, 3);
        double sd_percent = 100.0 * sample_sd(out.samples, trace.samples);
        CHECK(sd_percent == doctest::Approx(0.0152).epsilon(0.02));
    }

    SUBCASE("invalid spec rejected") {
        CHECK_THROWS_AS(add_awgn(trace, NoiseSpec{-0.1, 1}, 0), SpecError);
        CHECK_THROWS_AS(add_awgn(trace, NoiseSpec{0.1, 0}, 0), SpecError);
    }
}

TEST_CASE("water_vapor_overlay") {
    FrequencyGrid grid(0.2, 0.01, 156);

    SUBCASE("zero strength is the identity") {
        CVec Y = CVec::Ones(grid.k);
        CHECK((water_vapor_overlay(Y, grid, 0.0) - Y).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("local magnitude minima at the 11 line centers") {
        CVec Y = water_vapor_overlay(CVec::Ones(grid.k), grid, 2.0);
        for (double f : kWaterVaporLinesThz) {
            int bin = static_cast<int>(std::lround((f - grid.f_start) / grid.f_step));
            REQUIRE(bin > 0);
            REQUIRE(bin < grid.k - 1);
            CHECK(std::abs(Y[bin]) < std::abs(Y[bin - 1]));
            CHECK(std::abs(Y[bin]) < std::abs(Y[bin + 1]));
        }
    }

    SUBCASE("common-mode overlay cancels in standardize") {
        TimeTrace pulse = reference_pulse();
        CVec X = fft_spectrum(pulse, grid);
        CVec Y = forward_mix(default_materials(2), {1.5, 1.5}, pulse, grid);
        SpectrumSet clean(grid, X, {{Y, 3.0, "s"}});
        SpectrumSet overlaid(grid, water_vapor_overlay(X, grid, 1.3),
                             {{water_vapor_overlay(Y, grid, 1.3), 3.0, "s"}});
        Mat a = standardize(clean).X;
        Mat b = standardize(overlaid).X;
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-9);
    }

    SUBCASE("negative strength rejected") {
        CHECK_THROWS_AS(water_vapor_overlay(CVec::Ones(grid.k), grid, -1.0),
                        SpecError);
    }
}

TEST_CASE("build_dataset canned scenarios") {
    SUBCASE("ternary protocol: 3 pures plus 6 ordered 3:7 pairs") {
        SynthDataset ds = build_dataset(ternary_pures_scenario());
        CHECK(ds.spectra.sample_count() == 9);
        const Mat& T = ds.truth_abundances.matrix();
        CHECK(T.rows() == 3);
        int pures = 0, pairs = 0;
        for (int n = 0; n < 9; ++n) {
            double top = T.col(n).maxCoeff();
            if (top == doctest::Approx(1.0))
                ++pures;
            else if (top == doctest::Approx(0.7))
                ++pairs;
        }
        CHECK(pures == 3);
        CHECK(pairs == 6);
    }

    SUBCASE("quinary 5:5 pairs: 10 samples, no pures") {
        SynthDataset ds = build_dataset(quinary_pairs_scenario(0.5));
        CHECK(ds.spectra.sample_count() == 10);
        const Mat& T = ds.truth_abundances.matrix();
        for (int n = 0; n < 10; ++n) CHECK(T.col(n).maxCoeff() == doctest::Approx(0.5));
    }

    SUBCASE("composition test set: 15 ternary quarter-grid mixtures") {
        SynthDataset ds = build_dataset(composition_test_scenario());
        CHECK(ds.spectra.sample_count() == 15);
        const Mat& T = ds.truth_abundances.matrix();
        for (int n = 0; n < 15; ++n)
            for (int i = 0; i < 3; ++i)
                CHECK(std::abs(T(i, n) * 4 - std::lround(T(i, n) * 4)) < 1e-12);
    }

    SUBCASE("simplex violation rejected") {
        Scenario sc = ternary_pures_scenario();
        sc.materials.resize(2);
        sc.samples.clear();
        sc.samples.push_back({"bad", 3.05, {0.6, 0.6}});
        CHECK_THROWS_WITH_AS(build_dataset(sc),
                             doctest::Contains("not on simplex"), SpecError);
    }
}

TEST_CASE("noiseless end-to-end recovery of injected signatures") {
    Scenario sc = ternary_pures_scenario();
    SynthDataset ds = build_dataset(sc);
    StandardizedData data = standardize(ds.spectra);
    // The first three samples are the pures, in material order.
    for (int m = 0; m < 3; ++m)
        CHECK((data.X.col(m) - ds.truth_signatures.S.col(m)).cwiseAbs().maxCoeff() <
              1e-8);
}

TEST_CASE("standardize is linear in the mixing weights") {
    Scenario sc = ternary_pures_scenario();
    SynthDataset ds = build_dataset(sc);
    StandardizedData data = standardize(ds.spectra);
    const Mat& T = ds.truth_abundances.matrix();
    Mat pures = data.X.leftCols(3);
    for (int n = 3; n < data.sample_count(); ++n)
        CHECK((data.X.col(n) - pures * T.col(n)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("spectral noise scales as the inverse square root of trace count") {
    Scenario clean = ternary_pures_scenario();
    SynthDataset base = build_dataset(clean);
    std::vector<int> traces = {1, 100, 1000};
    std::vector<double> rms;
    for (int t : traces) {
        Scenario sc = ternary_pures_scenario(NoiseSpec{0.5, t}, 0);
        rms.push_back(spectral_noise_rms(build_dataset(sc).spectra, base.spectra));
    }
    CHECK(rms[0] / rms[1] == doctest::Approx(10.0).epsilon(0.05));
    CHECK(rms[1] / rms[2] == doctest::Approx(std::sqrt(10.0)).epsilon(0.05));
}

TEST_CASE("build_dataset is deterministic") {
    Scenario sc = quinary_pairs_scenario(0.5, NoiseSpec{0.1, 1}, 42);
    SynthDataset a = build_dataset(sc);
    SynthDataset b = build_dataset(sc);
    CHECK(a.spectra.reference == b.spectra.reference);
    for (int n = 0; n < a.spectra.sample_count(); ++n)
        CHECK(a.spectra.samples[n].spectrum == b.spectra.samples[n].spectrum);

    Scenario other = sc;
    other.seed = 43;
    SynthDataset c = build_dataset(other);
    CHECK(a.spectra.samples[0].spectrum != c.spectra.samples[0].spectrum);
}

TEST_CASE("scenario text round trip") {
    Scenario sc = quinary_pairs_scenario(0.7, NoiseSpec{0.48, 1000}, 17);
    sc.water_vapor_strength = 0.25;
    std::string text = format_scenario(sc);
    Scenario back = parse_scenario(text);
    CHECK(format_scenario(back) == text);
    CHECK(back.seed == 17);
    CHECK(back.noise.traces_averaged == 1000);
    CHECK(back.materials.size() == 5);
    CHECK(back.samples.size() == 10);
}

TEST_CASE("scenario parse errors carry line numbers") {
    SUBCASE("bad grid line") {
        CHECK_THROWS_WITH_AS(parse_scenario("grid 0.2 0.01\n"),
                             doctest::Contains("scenario:1"), SpecError);
    }

    SUBCASE("unknown directive on line 2") {
        std::string text = "seed 1\nbogus 3\n";
        CHECK_THROWS_WITH_AS(parse_scenario(text),
                             doctest::Contains("scenario:2"), SpecError);
    }

    SUBCASE("unknown material token") {
        CHECK_THROWS_WITH_AS(parse_scenario("material m sideband 2\n"),
                             doctest::Contains("unknown material token"), SpecError);
    }

    SUBCASE("validation failures reported after the last line") {
        std::string text =
            "material a baseline 2\nsample s 3.05 0.5 0.5\n";  // weight count
        CHECK_THROWS_WITH_AS(parse_scenario(text),
                             doctest::Contains("expected 1 weights"), SpecError);
    }

    SUBCASE("n must be a power of two") {
        std::string text =
            "pulse 0.05 1000\nmaterial a baseline 2\nsample s 3.05 1\n";
        CHECK_THROWS_WITH_AS(parse_scenario(text),
                             doctest::Contains("power of two"), SpecError);
    }
}
