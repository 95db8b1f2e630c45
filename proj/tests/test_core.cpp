#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "hyperion/io.hpp"
#include "hyperion/rng.hpp"
#include "hyperion/types.hpp"

using namespace hyperion;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    fs::path p = fs::temp_directory_path() / "hyperion_test_core";
    fs::create_directories(p);
    return p;
}

SpectrumSet random_set(std::uint64_t seed, int k, int samples) {
    Rng rng(seed);
    FrequencyGrid grid(0.2 + 0.05 * rng.uniform(), 0.01, k);
    CVec ref(k);
    for (int i = 0; i < k; ++i)
        ref[i] = {rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0)};
    std::vector<SampleSpectrum> smp(samples);
    for (int n = 0; n < samples; ++n) {
        smp[n].spectrum = CVec(k);
        for (int i = 0; i < k; ++i)
            smp[n].spectrum[i] = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        smp[n].thickness_mm = rng.uniform(1.0, 4.0);
        smp[n].label = "s" + std::to_string(n);
    }
    return SpectrumSet(grid, ref, smp);
}

bool sets_equal(const SpectrumSet& a, const SpectrumSet& b) {
    if (!(a.grid == b.grid)) return false;
    if (a.reference != b.reference) return false;
    if (a.samples.size() != b.samples.size()) return false;
    for (size_t n = 0; n < a.samples.size(); ++n) {
        if (a.samples[n].spectrum != b.samples[n].spectrum) return false;
        if (a.samples[n].thickness_mm != b.samples[n].thickness_mm) return false;
        if (a.samples[n].label != b.samples[n].label) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("FrequencyGrid invariants and accessors") {
    FrequencyGrid g(0.2, 0.01, 156);
    CHECK(g.freq(0) == doctest::Approx(0.2));
    CHECK(g.freq(155) == doctest::Approx(1.75));
    CHECK(g.freqs().size() == 156);
    CHECK_THROWS_AS(FrequencyGrid(0.2, 0.0, 10), SpecError);
    CHECK_THROWS_AS(FrequencyGrid(0.2, -0.01, 10), SpecError);
    CHECK_THROWS_AS(FrequencyGrid(0.2, 0.01, 1), SpecError);
}

TEST_CASE("grids_match tolerates roundoff but not structure changes") {
    FrequencyGrid a(0.2, 0.01, 156);
    FrequencyGrid b(0.2, 0.010000000000000009, 156);
    CHECK(grids_match(a, b));
    CHECK_FALSE(a == b);
    CHECK_FALSE(grids_match(a, FrequencyGrid(0.2, 0.01, 155)));
    CHECK_FALSE(grids_match(a, FrequencyGrid(0.21, 0.01, 156)));
    CHECK_FALSE(grids_match(a, FrequencyGrid(0.2, 0.02, 156)));
}

TEST_CASE("TimeTrace invariants") {
    CHECK_NOTHROW(TimeTrace(0.05, {0.0, 1.0}));
    CHECK_THROWS_AS(TimeTrace(0.0, {0.0, 1.0}), SpecError);
    CHECK_THROWS_AS(TimeTrace(0.05, {0.0}), SpecError);
    CHECK_THROWS_AS(TimeTrace(0.05, {0.0, std::nan("")}), SpecError);
    TimeTrace t(0.05, {0.0, 1.0, 0.0, -1.0});
    CHECK(t.nyquist_thz() == doctest::Approx(10.0));
}

TEST_CASE("SpectrumSet invariants") {
    SpectrumSet set = random_set(1, 4, 2);
    CHECK(set.bands() == 4);
    CHECK(set.sample_count() == 2);

    SpectrumSet bad = set;
    bad.samples[1].spectrum = CVec::Ones(3);
    CHECK_THROWS_WITH_AS(bad.validate(),
                         doctest::Contains("inconsistent band count"), SpecError);

    bad = set;
    bad.samples[0].thickness_mm = 0;
    CHECK_THROWS_WITH_AS(bad.validate(),
                         doctest::Contains("nonpositive thickness"), SpecError);
}

TEST_CASE("dataset file round trip") {
    fs::path dir = temp_dir();

    SUBCASE("two samples, four bands") {
        SpectrumSet set = random_set(2, 4, 2);
        std::string path = (dir / "small.txt").string();
        write_dataset(set, path);
        SpectrumSet back = read_dataset(path);
        CHECK(back.sample_count() == 2);
        CHECK(back.grid.k == 4);
        CHECK(sets_equal(set, back));
    }

    SUBCASE("empty sample list") {
        SpectrumSet set = random_set(3, 5, 2);
        set.samples.clear();
        std::string path = (dir / "empty.txt").string();
        write_dataset(set, path);
        SpectrumSet back = read_dataset(path);
        CHECK(back.sample_count() == 0);
        CHECK(sets_equal(set, back));
    }

    SUBCASE("default analysis band has 156 bands") {
        SpectrumSet set = random_set(4, 4, 1);
        set = SpectrumSet(FrequencyGrid(0.2, 0.01, 156), CVec::Ones(156),
                          {{CVec::Ones(156), 3.05, "tablet"}});
        std::string path = (dir / "band.txt").string();
        write_dataset(set, path);
        SpectrumSet back = read_dataset(path);
        CHECK(back.grid.k == 156);
        CHECK(back.grid.freq(back.grid.k - 1) == doctest::Approx(1.75));
        CHECK(back.samples[0].thickness_mm == 3.05);
    }

    SUBCASE("bit-exact round trip over random sets") {
        for (std::uint64_t seed = 10; seed < 20; ++seed) {
            SpectrumSet set = random_set(seed, 3 + seed % 5, 1 + seed % 4);
            std::string path = (dir / ("rand" + std::to_string(seed) + ".txt")).string();
            write_dataset(set, path);
            CHECK(sets_equal(set, read_dataset(path)));
        }
    }
}

TEST_CASE("dataset parse errors carry locations") {
    fs::path dir = temp_dir();

    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_dataset((dir / "missing.txt").string()), SpecError);
    }

    SUBCASE("sample row with k-1 values") {
        std::string path = (dir / "short_row.txt").string();
        write_text_file(path,
                        "#grid 0.2 0.01 3\n"
                        "#reference\n1:0 1:0 1:0\n"
                        "#sample a 3.05\n1:0 1:0\n");
        CHECK_THROWS_WITH_AS(read_dataset(path),
                             doctest::Contains("band count"), SpecError);
    }

    SUBCASE("nonpositive thickness") {
        std::string path = (dir / "bad_thickness.txt").string();
        write_text_file(path,
                        "#grid 0.2 0.01 2\n"
                        "#reference\n1:0 1:0\n"
                        "#sample a -1\n1:0 1:0\n");
        CHECK_THROWS_AS(read_dataset(path), SpecError);
    }

    SUBCASE("malformed header") {
        std::string path = (dir / "bad_header.txt").string();
        write_text_file(path, "#grid 0.2 0.01\n");
        CHECK_THROWS_AS(read_dataset(path), SpecError);
    }

    SUBCASE("thickness 3.05 parses") {
        std::string path = (dir / "thick.txt").string();
        write_text_file(path,
                        "#grid 0.2 0.01 2\n"
                        "#reference\n1:0 1:0\n"
                        "#sample tablet 3.05\n0.5:0 0.5:0\n");
        SpectrumSet set = read_dataset(path);
        CHECK(set.samples[0].thickness_mm == 3.05);
        CHECK(set.samples[0].label == "tablet");
    }
}

TEST_CASE("restrict_band") {
    Rng rng(7);
    FrequencyGrid grid(0.0, 0.05, 61);  // 0.0 .. 3.0 THz
    CVec ref(61);
    CVec y(61);
    for (int i = 0; i < 61; ++i) {
        ref[i] = {rng.uniform(0.5, 1.5), 0.0};
        y[i] = {rng.uniform(0.1, 1.0), 0.0};
    }
    SpectrumSet set(grid, ref, {{y, 3.05, "s"}});

    SUBCASE("restricting to own range is the identity") {
        SpectrumSet r = restrict_band(set, 0.0, 3.0);
        CHECK(sets_equal(r, set));
    }

    SUBCASE("0.2-1.75 keeps only in-band bands") {
        SpectrumSet r = restrict_band(set, kBandLoThz, kBandHiThz);
        CHECK(r.grid.freq(0) >= 0.2);
        CHECK(r.grid.freq(r.grid.k - 1) <= 1.75);
        // 0.20, 0.25, ..., 1.75
        CHECK(r.grid.k == 32);
        CHECK(r.samples[0].spectrum[0] == y[4]);
    }

    SUBCASE("idempotence") {
        SpectrumSet once = restrict_band(set, 0.2, 1.75);
        SpectrumSet twice = restrict_band(once, 0.2, 1.75);
        CHECK(sets_equal(once, twice));
    }

    SUBCASE("empty intersection") {
        CHECK_THROWS_AS(restrict_band(set, 5.0, 6.0), SpecError);
    }

    SUBCASE("bad bounds") {
        CHECK_THROWS_AS(restrict_band(set, 2.0, 1.0), SpecError);
    }
}

TEST_CASE("AbundanceMatrix validation") {
    Mat good(2, 2);
    good << 0.25, 1.0, 0.75, 0.0;
    CHECK_NOTHROW(AbundanceMatrix(good));

    SUBCASE("column sum off by more than 1e-9") {
        Mat t = good;
        t(0, 0) += 1e-8;
        CHECK_THROWS_WITH_AS(AbundanceMatrix{t}, doctest::Contains("sums to"),
                             SpecError);
    }

    SUBCASE("negative entry below -1e-12 rejected") {
        Mat t(2, 1);
        t << -1e-6, 1.0 + 1e-6;
        CHECK_THROWS_WITH_AS(AbundanceMatrix{t}, doctest::Contains("negative"),
                             SpecError);
    }

    SUBCASE("tiny negatives are clamped to zero") {
        Mat t(2, 1);
        t << -5e-13, 1.0 + 5e-13;
        AbundanceMatrix ab(t);
        CHECK(ab.matrix()(0, 0) == 0.0);
        CHECK(ab.matrix()(1, 0) == 1.0 + 5e-13);
    }
}

TEST_CASE("SignatureSet validation") {
    SignatureSet sigs;
    sigs.grid = FrequencyGrid(0.2, 0.01, 3);
    sigs.S = Mat::Ones(3, 2);
    sigs.labels = {"a", "b"};
    CHECK_NOTHROW(sigs.validate());

    SignatureSet one = sigs;
    one.S = Mat::Ones(3, 1);
    CHECK_THROWS_AS(one.validate(), SpecError);

    SignatureSet off_grid = sigs;
    off_grid.S = Mat::Ones(4, 2);
    CHECK_THROWS_AS(off_grid.validate(), SpecError);

    SignatureSet inf = sigs;
    inf.S(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(inf.validate(), SpecError);
}

TEST_CASE("signature and abundance CSV round trips") {
    fs::path dir = temp_dir();

    SignatureSet sigs;
    sigs.grid = FrequencyGrid(0.2, 0.01, 4);
    sigs.S.resize(4, 2);
    sigs.S << 1.0, 2.5, 3.25, 4.0, 0.125, 6.0, 7.5, 8.0;
    sigs.labels = {"tyrosine_like", "maltose_like"};
    std::string spath = (dir / "sigs.csv").string();
    write_signatures_csv(sigs, spath);
    SignatureSet sback = read_signatures_csv(spath);
    CHECK(grids_match(sback.grid, sigs.grid));
    CHECK(sback.labels == sigs.labels);
    CHECK((sback.S - sigs.S).cwiseAbs().maxCoeff() == 0.0);

    Mat t(2, 3);
    t << 0.25, 0.5, 1.0, 0.75, 0.5, 0.0;
    AbundanceMatrix ab(t);
    std::string apath = (dir / "ab.csv").string();
    write_abundances_csv(ab, {"a", "b"}, {"s0", "s1", "s2"}, apath);
    std::vector<std::string> labels;
    AbundanceMatrix aback = read_abundances_csv(apath, &labels);
    CHECK(labels == std::vector<std::string>{"a", "b"});
    CHECK((aback.matrix() - t).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("format_double survives a 17-digit round trip") {
    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        double v = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform(-6, 6));
        CHECK(std::stod(format_double(v)) == v);
    }
}
