#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hyperion/composition.hpp"
#include "hyperion/experiments.hpp"
#include "hyperion/io.hpp"
#include "hyperion/metrics.hpp"
#include "hyperion/preprocess.hpp"
#include "hyperion/svg.hpp"
#include "hyperion/synth.hpp"
#include "hyperion/unmix.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hyperion;

namespace {

struct Manifest {
    fs::path dir;
    json files = json::object();

    void write_file(const fs::path& name, const std::string& content) {
        fs::create_directories(dir);
        fs::path p = dir / name;
        write_text_file(p.string(), content);
        files[name.string()] = fnv1a_hex(content);
    }

    void finish(const std::string& status, const std::string& message = "") {
        json m;
        m["status"] = status;
        if (!message.empty()) m["message"] = message;
        m["files"] = files;
        fs::create_directories(dir);
        write_text_file((dir / "manifest.json").string(), m.dump(2) + "\n");
    }
};

std::pair<double, double> parse_band(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos)
        throw SpecError("--band expects lo:hi, got '" + s + "'");
    return {std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
}

Scenario load_scenario(const std::string& arg) {
    if (arg.rfind("builtin:", 0) == 0) {
        std::string name = arg.substr(8);
        if (name == "ternary") return ternary_pures_scenario();
        if (name == "quinary55") return quinary_pairs_scenario(0.5);
        if (name == "quinary70") return quinary_pairs_scenario(0.7);
        if (name == "composition") return composition_test_scenario();
        throw SpecError("unknown builtin scenario '" + name + "'");
    }
    if (!fs::exists(arg)) throw SpecError("scenario file not found: " + arg);
    return parse_scenario(read_text_file(arg));
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stod(tok));
    if (out.empty()) throw SpecError("expected a comma-separated list, got '" + s + "'");
    return out;
}

std::vector<std::string> parse_names(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(tok);
    return out;
}

std::vector<std::uint64_t> derive_seeds(std::uint64_t base, int count) {
    std::vector<std::uint64_t> s;
    for (int i = 0; i < count; ++i) s.push_back(base + static_cast<std::uint64_t>(i));
    return s;
}

std::string standardized_csv(const StandardizedData& data) {
    std::ostringstream out;
    out << "f_thz";
    for (const std::string& l : data.labels) out << "," << l;
    out << "\n";
    for (int i = 0; i < data.bands(); ++i) {
        out << format_double(data.grid.freq(i));
        for (int n = 0; n < data.sample_count(); ++n)
            out << "," << format_double(data.X(i, n));
        out << "\n";
    }
    return out.str();
}

std::string abundances_csv(const Mat& T, const std::vector<std::string>& materials,
                           const std::vector<std::string>& samples) {
    std::ostringstream out;
    out << "material";
    for (const std::string& s : samples) out << "," << s;
    out << "\n";
    for (int m = 0; m < T.rows(); ++m) {
        out << materials[m];
        for (int n = 0; n < T.cols(); ++n) out << "," << format_double(T(m, n));
        out << "\n";
    }
    return out.str();
}

std::string signatures_csv_text(const SignatureSet& sigs) {
    std::ostringstream out;
    out << "label";
    for (int i = 0; i < sigs.grid.k; ++i) out << "," << format_double(sigs.grid.freq(i));
    out << "\n";
    for (int m = 0; m < sigs.materials(); ++m) {
        out << sigs.labels[m];
        for (int i = 0; i < sigs.bands(); ++i) out << "," << format_double(sigs.S(i, m));
        out << "\n";
    }
    return out.str();
}

fs::path default_out_root() {
    const char* env = std::getenv("HYPERION_DATA_DIR");
    return env && *env ? fs::path(env) : fs::path(".");
}

int cmd_generate(const std::string& scenario_arg, fs::path out, std::uint64_t seed,
                 bool seed_set) {
    Scenario sc = load_scenario(scenario_arg);
    if (seed_set) sc.seed = seed;
    SynthDataset ds = build_dataset(sc);
    Manifest man{out};
    fs::create_directories(out);
    write_dataset(ds.spectra, (out / "dataset.txt").string());
    man.files["dataset.txt"] = fnv1a_hex(read_text_file((out / "dataset.txt").string()));
    man.write_file("scenario.txt", format_scenario(sc));
    man.write_file("truth_signatures.csv", signatures_csv_text(ds.truth_signatures));
    std::vector<std::string> sample_labels;
    for (const auto& s : ds.spectra.samples) sample_labels.push_back(s.label);
    man.write_file("truth_abundances.csv",
                   abundances_csv(ds.truth_abundances.matrix(),
                                  ds.truth_signatures.labels, sample_labels));
    man.finish("ok");
    std::cout << "wrote " << ds.spectra.sample_count() << "-sample dataset to " << out
              << "\n";
    return 0;
}

int cmd_preprocess(const std::string& dataset, fs::path out,
                   std::pair<double, double> band) {
    SpectrumSet set = restrict_band(read_dataset(dataset), band.first, band.second);
    StandardizedData data = standardize(set);
    Manifest man{out};
    man.write_file("standardized.csv", standardized_csv(data));
    man.finish("ok");
    std::cout << "standardized " << data.sample_count() << " samples, "
              << data.bands() << " bands\n";
    return 0;
}

int cmd_unmix(const std::string& dataset, const std::string& method, int q,
              double lambda, std::uint64_t seed, fs::path out,
              std::pair<double, double> band, const std::string& truth_path) {
    if (method != "hyperion" && method != "nmf" && method != "spa")
        throw CLI::ValidationError("--method must be one of hyperion, nmf, spa");
    SpectrumSet set = restrict_band(read_dataset(dataset), band.first, band.second);
    StandardizedData data = standardize(set);

    SignatureSet sigs;
    Mat T;
    std::string runlog;
    if (method == "hyperion") {
        HyperionConfig cfg;
        cfg.q = q;
        cfg.lambda = lambda;
        cfg.seed = seed;
        HyperionResult r = hyperion_unmix(data, cfg);
        sigs = r.signatures;
        T = r.abundances.matrix();
        std::ostringstream log;
        log << "method hyperion q " << q << " lambda " << format_double(lambda) << "\n";
        for (size_t i = 0; i < r.objective_trace.size(); ++i)
            log << "iter " << i << " objective " << format_double(r.objective_trace[i])
                << "\n";
        if (!r.diagnostic.empty()) log << "diagnostic " << r.diagnostic << "\n";
        runlog = log.str();
    } else {
        Mat S = unmix_with_method(data, method, q, lambda, seed);
        sigs.grid = data.grid;
        sigs.S = S;
        for (int j = 0; j < q; ++j) sigs.labels.push_back("material_" + std::to_string(j + 1));
        sigs.validate();
        T = update_T(data.X, S).matrix();
        runlog = "method " + method + " q " + std::to_string(q) + "\n";
    }

    Manifest man{out};
    man.write_file("signatures.csv", signatures_csv_text(sigs));
    man.write_file("abundances.csv", abundances_csv(T, sigs.labels, data.labels));
    man.write_file("runlog.txt", runlog);
    if (!truth_path.empty()) {
        SignatureSet truth = read_signatures_csv(truth_path);
        if (truth.bands() != sigs.bands())
            throw SpecError("truth signatures band count differs from dataset; "
                            "apply the same --band");
        Alignment a = align_signatures(sigs.S, truth.S);
        std::ostringstream m;
        m << "material,sam_deg,rmse_cm\n";
        for (int j = 0; j < truth.materials(); ++j)
            m << truth.labels[j] << "," << format_double(a.sam_deg[j]) << ","
              << format_double(a.rmse_cm[j]) << "\n";
        m << "mean," << format_double(a.mean_sam) << "," << format_double(a.mean_rmse)
          << "\n";
        man.write_file("metrics.csv", m.str());
    }
    man.finish("ok");
    std::cout << "unmixed " << data.sample_count() << " samples with " << method << "\n";
    return 0;
}

int cmd_sweep(const std::string& scenario_arg, const std::string& sd_list,
              int n_seeds, std::uint64_t seed, const std::string& methods_arg,
              double lambda, int jobs, fs::path out) {
    Scenario sc = load_scenario(scenario_arg);
    SweepResult res = run_noise_sweep(sc, parse_list(sd_list),
                                      derive_seeds(seed, n_seeds),
                                      parse_names(methods_arg), lambda, jobs);
    Manifest man{out};
    man.write_file("sweep.csv", sweep_csv(res));
    man.write_file("sweep_summary.csv", sweep_summary_csv(res));

    SvgChart chart;
    chart.title = "RMSE vs noise sd";
    chart.x_label = "noise sd (% of peak-to-peak)";
    chart.y_label = "median RMSE (1/cm)";
    chart.log_x = true;
    std::vector<std::string> methods = parse_names(methods_arg);
    for (size_t m = 0; m < methods.size(); ++m) {
        SvgSeries s;
        s.label = methods[m];
        s.color = svg_palette(static_cast<int>(m));
        s.points = true;
        for (const SweepSummary& sum : res.summaries)
            if (sum.method == methods[m]) {
                s.x.push_back(sum.sd_percent);
                s.y.push_back(sum.rmse_median);
            }
        chart.series.push_back(std::move(s));
    }
    man.write_file("rmse_vs_sd.svg", chart.render());

    int failures = 0;
    for (const SweepRow& r : res.rows) failures += r.failed ? 1 : 0;
    man.finish(failures == 0 ? "ok" : "partial",
               failures ? std::to_string(failures) + " cells failed" : "");
    std::cout << res.rows.size() << " sweep rows, " << failures << " failures\n";
    return failures == 0 ? 0 : 2;
}

int cmd_compare(const std::string& scenario_arg, const std::string& sd_list,
                int n_seeds, std::uint64_t seed, double lambda, int jobs,
                fs::path out) {
    Scenario sc = load_scenario(scenario_arg);
    CompareResult res = run_method_comparison(sc, parse_list(sd_list),
                                              derive_seeds(seed, n_seeds), lambda, jobs);
    Manifest man{out};
    man.write_file("compare.csv", compare_csv(res));

    SvgChart chart;
    chart.title = "Median per-material RMSE vs noise sd";
    chart.x_label = "noise sd (% of peak-to-peak)";
    chart.y_label = "median RMSE (1/cm)";
    chart.log_x = true;
    const std::vector<std::string> methods = {"hyperion", "nmf", "spa"};
    for (size_t m = 0; m < methods.size(); ++m) {
        SvgSeries s;
        s.label = methods[m];
        s.color = svg_palette(static_cast<int>(m));
        s.points = true;
        for (double sd : parse_list(sd_list)) {
            std::vector<double> cell;
            for (const CompareRow& r : res.rows)
                if (r.method == methods[m] && r.sd_percent == sd && !r.failed)
                    for (double v : r.rmse_cm) cell.push_back(v);
            if (!cell.empty()) {
                s.x.push_back(sd);
                s.y.push_back(median(cell));
            }
        }
        chart.series.push_back(std::move(s));
    }
    man.write_file("rmse_vs_sd.svg", chart.render());

    int failures = 0;
    for (const CompareRow& r : res.rows) failures += r.failed ? 1 : 0;
    man.finish(failures == 0 ? "ok" : "partial",
               failures ? std::to_string(failures) + " cells failed" : "");
    std::cout << res.rows.size() << " comparison rows, " << failures << " failures\n";
    return failures == 0 ? 0 : 2;
}

int cmd_estimate(const std::string& library_path, const std::string& samples_path,
                 fs::path out, std::pair<double, double> band,
                 const std::string& truth_path) {
    SignatureSet lib = read_signatures_csv(library_path);
    SpectrumSet set = restrict_band(read_dataset(samples_path), band.first, band.second);
    StandardizedData data = standardize(set);
    if (!grids_match(data.grid, lib.grid))
        throw SpecError("library grid does not match the dataset band; "
                        "apply the same --band");
    Mat R = estimate_compositions(data.X, lib.S);

    Manifest man{out};
    man.write_file("composition.csv", abundances_csv(R, lib.labels, data.labels));
    if (!truth_path.empty()) {
        std::vector<std::string> mat_labels;
        AbundanceMatrix truth = read_abundances_csv(truth_path, &mat_labels);
        if (truth.materials() != lib.materials() ||
            truth.sample_count() != data.sample_count())
            throw SpecError("truth abundance table shape mismatch");
        std::ostringstream t;
        t << "sample";
        for (const std::string& m : lib.labels)
            t << ",est_" << m << ",true_" << m << ",abs_err_" << m;
        t << ",max_abs_err\n";
        for (int n = 0; n < data.sample_count(); ++n) {
            t << data.labels[n];
            double worst = 0;
            for (int m = 0; m < lib.materials(); ++m) {
                double err = std::abs(R(m, n) - truth.matrix()(m, n));
                worst = std::max(worst, err);
                t << "," << format_double(R(m, n)) << ","
                  << format_double(truth.matrix()(m, n)) << "," << format_double(err);
            }
            t << "," << format_double(worst) << "\n";
        }
        man.write_file("composition_vs_truth.csv", t.str());
    }
    man.finish("ok");
    std::cout << "estimated compositions for " << data.sample_count() << " samples\n";
    return 0;
}

int cmd_validate(const std::string& scenario_arg, fs::path out) {
    Scenario sc = load_scenario(scenario_arg);
    ValidationResult res = run_model_validation(sc);
    Manifest man{out};
    man.write_file("validation.csv", validation_csv(res));
    {
        std::ostringstream p;
        p << "sample,pc1,pc2\n";
        for (size_t n = 0; n < res.labels.size(); ++n)
            p << res.labels[n] << "," << format_double(res.pca(0, n)) << ","
              << format_double(res.pca(1, n)) << "\n";
        man.write_file("pca.csv", p.str());
    }
    SvgChart chart;
    chart.title = "PCA of standardized spectra";
    chart.x_label = "PC 1";
    chart.y_label = "PC 2";
    SvgSeries s;
    s.label = "samples";
    s.points = true;
    s.line = false;
    for (int n = 0; n < res.pca.cols(); ++n) {
        s.x.push_back(res.pca(0, n));
        s.y.push_back(res.pca(1, n));
    }
    chart.series.push_back(std::move(s));
    man.write_file("pca.svg", chart.render());
    man.finish("ok");
    std::cout << res.rows.size() << " mixtures validated\n";
    return 0;
}

int cmd_plot(const std::string& input, fs::path out, const std::string& truth_path) {
    std::string text = read_text_file(input);
    std::istringstream in(text);
    std::string header;
    std::getline(in, header);
    Manifest man{out};

    if (header.rfind("label,", 0) == 0) {
        // signatures CSV: one overlay SVG per material
        SignatureSet sigs = read_signatures_csv(input);
        SignatureSet truth;
        bool have_truth = !truth_path.empty();
        if (have_truth) truth = read_signatures_csv(truth_path);
        for (int m = 0; m < sigs.materials(); ++m) {
            SvgChart chart;
            chart.title = sigs.labels[m];
            chart.x_label = "frequency (THz)";
            chart.y_label = "absorption (1/cm)";
            SvgSeries est;
            est.label = "estimate";
            est.color = svg_palette(0);
            for (int i = 0; i < sigs.bands(); ++i) {
                est.x.push_back(sigs.grid.freq(i));
                est.y.push_back(sigs.S(i, m));
            }
            chart.series.push_back(std::move(est));
            if (have_truth && m < truth.materials() && truth.bands() == sigs.bands()) {
                SvgSeries tr;
                tr.label = "truth";
                tr.color = svg_palette(1);
                for (int i = 0; i < truth.bands(); ++i) {
                    tr.x.push_back(truth.grid.freq(i));
                    tr.y.push_back(truth.S(i, m));
                }
                chart.series.push_back(std::move(tr));
            }
            man.write_file(sigs.labels[m] + ".svg", chart.render());
        }
        man.finish("ok");
        std::cout << sigs.materials() << " signature plots written\n";
        return 0;
    }
    if (header.rfind("sd_percent,method", 0) == 0) {
        // sweep summary CSV: RMSE vs sd per method
        std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> per;
        std::string line;
        while (std::getline(in, line)) {
            std::stringstream ls(line);
            std::string sd, method, sam_med, sam_q1, sam_q3, rmse_med;
            std::getline(ls, sd, ',');
            std::getline(ls, method, ',');
            std::getline(ls, sam_med, ',');
            std::getline(ls, sam_q1, ',');
            std::getline(ls, sam_q3, ',');
            std::getline(ls, rmse_med, ',');
            per[method].first.push_back(std::stod(sd));
            per[method].second.push_back(std::stod(rmse_med));
        }
        SvgChart chart;
        chart.title = "Median RMSE vs noise sd";
        chart.x_label = "noise sd (% of peak-to-peak)";
        chart.y_label = "median RMSE (1/cm)";
        chart.log_x = true;
        int i = 0;
        for (auto& [method, xy] : per) {
            SvgSeries s;
            s.label = method;
            s.color = svg_palette(i++);
            s.points = true;
            s.x = xy.first;
            s.y = xy.second;
            chart.series.push_back(std::move(s));
        }
        man.write_file("rmse_vs_sd.svg", chart.render());
        man.finish("ok");
        std::cout << "sweep plot written\n";
        return 0;
    }
    throw SpecError("plot: unrecognized CSV header in " + input);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HYPERION: blind hyperspectral unmixing for transmission "
                 "THz spectroscopy"};
    app.require_subcommand(1);
    app.fallthrough();  // let global flags appear after the subcommand

    std::uint64_t seed = 0;
    int jobs = 1;
    std::string band = "0.2:1.75";
    double lambda = 1.0;
    int q = 3;
    app.add_option("--seed", seed, "base RNG seed")->capture_default_str();
    app.add_option("--jobs", jobs, "worker threads for sweeps")->capture_default_str();
    app.add_option("--band", band, "analysis band lo:hi in THz")->capture_default_str();
    app.add_option("--lambda", lambda, "regularization weight")->capture_default_str();
    app.add_option("--q", q, "material count")->capture_default_str();

    std::string scenario, dataset, method = "hyperion", out, truth, library, samples;
    std::string sd_list = "0.001,0.01,0.04,0.1", methods = "hyperion";
    int n_seeds = 10;
    std::string plot_input;

    auto* gen = app.add_subcommand("generate", "synthesize a dataset from a scenario");
    gen->add_option("scenario", scenario, "scenario file or builtin:<name>")->required();
    gen->add_option("--out", out, "output directory");

    auto* pre = app.add_subcommand("preprocess", "standardize a dataset");
    pre->add_option("dataset", dataset, "dataset file")->required();
    pre->add_option("--out", out, "output directory");

    auto* unm = app.add_subcommand("unmix", "blind unmixing of a dataset");
    unm->add_option("dataset", dataset, "dataset file")->required();
    unm->add_option("--method", method, "hyperion | nmf | spa")->capture_default_str();
    unm->add_option("--truth", truth, "ground-truth signatures CSV for metrics");
    unm->add_option("--out", out, "output directory");

    auto* swp = app.add_subcommand("sweep-noise", "noise robustness sweep");
    swp->add_option("scenario", scenario, "scenario file or builtin:<name>")->required();
    swp->add_option("--sd", sd_list, "comma-separated sd levels in %")
        ->capture_default_str();
    swp->add_option("--seeds", n_seeds, "number of noise realizations")
        ->capture_default_str();
    swp->add_option("--methods", methods, "comma-separated method list")
        ->capture_default_str();
    swp->add_option("--out", out, "output directory");

    auto* cmp = app.add_subcommand("compare", "HYPERION vs NMF vs SPA comparison");
    cmp->add_option("scenario", scenario, "scenario file or builtin:<name>")->required();
    cmp->add_option("--sd", sd_list, "comma-separated sd levels in %")
        ->capture_default_str();
    cmp->add_option("--seeds", n_seeds, "number of noise realizations")
        ->capture_default_str();
    cmp->add_option("--out", out, "output directory");

    auto* est = app.add_subcommand("estimate-composition",
                                   "proportions of new samples vs a library");
    est->add_option("--library", library, "signature library CSV")->required();
    est->add_option("--samples", samples, "dataset file with the new samples")
        ->required();
    est->add_option("--truth", truth, "ground-truth abundances CSV");
    est->add_option("--out", out, "output directory");

    auto* val = app.add_subcommand("validate-model", "linear mixing model check");
    val->add_option("scenario", scenario, "scenario file or builtin:<name>")->required();
    val->add_option("--out", out, "output directory");

    auto* plt = app.add_subcommand("plot", "render a results CSV to SVG");
    plt->add_option("input", plot_input, "CSV file")->required();
    plt->add_option("--truth", truth, "ground-truth signatures CSV overlay");
    plt->add_option("--out", out, "output directory");

    CLI11_PARSE(app, argc, argv);

    fs::path out_dir = out.empty() ? default_out_root() : fs::path(out);
    try {
        auto band_pair = parse_band(band);
        if (gen->parsed())
            return cmd_generate(scenario, out_dir, seed, app.count("--seed") > 0);
        if (pre->parsed()) return cmd_preprocess(dataset, out_dir, band_pair);
        if (unm->parsed())
            return cmd_unmix(dataset, method, q, lambda, seed, out_dir, band_pair, truth);
        if (swp->parsed())
            return cmd_sweep(scenario, sd_list, n_seeds, seed, methods, lambda, jobs,
                             out_dir);
        if (cmp->parsed())
            return cmd_compare(scenario, sd_list, n_seeds, seed, lambda, jobs, out_dir);
        if (est->parsed())
            return cmd_estimate(library, samples, out_dir, band_pair, truth);
        if (val->parsed()) return cmd_validate(scenario, out_dir);
        if (plt->parsed()) return cmd_plot(plot_input, out_dir, truth);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        try {
            Manifest man{out_dir};
            man.finish("error", e.what());
        } catch (...) {
        }
        return 1;
    }
    return 0;
}
