#include "hyperion/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <thread>

#include <Eigen/Cholesky>

#include "hyperion/baselines.hpp"
#include "hyperion/io.hpp"
#include "hyperion/metrics.hpp"
#include "hyperion/preprocess.hpp"
#include "hyperion/unmix.hpp"

namespace hyperion {

namespace {

void parallel_for(int count, int jobs, const std::function<void(int)>& body) {
    jobs = std::max(1, jobs);
    if (jobs == 1 || count <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min(jobs, count); ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

std::string config_hash_for(const std::string& method, int q, double lambda,
                            std::uint64_t seed) {
    return fnv1a_hex(method + "|q=" + std::to_string(q) +
                     "|lambda=" + format_double(lambda) +
                     "|seed=" + std::to_string(seed));
}

std::string csv_quote(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (c == ',' || c == '\n') c = ';';
    return out;
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream o;
    o << std::hex;
    o.width(16);
    o.fill('0');
    o << h;
    return o.str();
}

Mat unmix_with_method(const StandardizedData& data, const std::string& method,
                      int q, double lambda, std::uint64_t seed) {
    if (method == "hyperion") {
        HyperionConfig cfg;
        cfg.q = q;
        cfg.lambda = lambda;
        cfg.seed = seed;
        return hyperion_unmix(data, cfg).signatures.S;
    }
    if (method == "nmf") {
        NmfConfig cfg;
        cfg.seed = seed;
        NmfResult r = nmf_als(data.X.cwiseMax(0.0), q, cfg);
        // NMF leaves the W/H scale split arbitrary; rescale so abundance
        // columns sum to ~1 and W carries physical units (least squares for
        // the per-row scale of H).
        Mat G = r.H * r.H.transpose();
        G.diagonal().array() += 1e-12;
        Vec u = G.ldlt().solve(r.H * Vec::Ones(r.H.cols()));
        Mat W = r.W;
        for (int j = 0; j < q; ++j)
            if (std::abs(u[j]) > 1e-9) W.col(j) /= u[j];
        return W;
    }
    if (method == "spa") {
        std::vector<int> idx = spa(data.X, q);
        Mat S(data.X.rows(), q);
        for (int j = 0; j < q; ++j) S.col(j) = data.X.col(idx[j]);
        return S;
    }
    throw SpecError("unmix_with_method: unknown method '" + method + "'");
}

SweepResult run_noise_sweep(const Scenario& base, const std::vector<double>& sd_grid,
                            const std::vector<std::uint64_t>& seeds,
                            const std::vector<std::string>& methods,
                            double lambda, int jobs) {
    if (seeds.size() < 3) throw SpecError("run_noise_sweep: need >= 3 seeds");
    if (sd_grid.empty() || methods.empty())
        throw SpecError("run_noise_sweep: empty sd grid or method list");
    const int q = static_cast<int>(base.materials.size());
    const int n_cells = static_cast<int>(sd_grid.size() * seeds.size());

    SweepResult res;
    res.rows.resize(n_cells * methods.size());
    parallel_for(n_cells, jobs, [&](int cell) {
        const double sd = sd_grid[cell / seeds.size()];
        const std::uint64_t seed = seeds[cell % seeds.size()];
        Scenario sc = base;
        sc.noise.sd_percent = sd;
        sc.seed = seed;
        const std::string sc_hash = fnv1a_hex(format_scenario(sc));

        SynthDataset ds;
        StandardizedData data;
        std::string gen_error;
        try {
            ds = build_dataset(sc);
            data = standardize(ds.spectra);
        } catch (const std::exception& e) {
            gen_error = e.what();
        }
        for (size_t m = 0; m < methods.size(); ++m) {
            SweepRow& row = res.rows[cell * methods.size() + m];
            row.sd_percent = sd;
            row.seed = seed;
            row.method = methods[m];
            row.scenario_hash = sc_hash;
            row.config_hash = config_hash_for(methods[m], q, lambda, seed);
            if (!gen_error.empty()) {
                row.failed = true;
                row.error = gen_error;
                continue;
            }
            try {
                Mat S = unmix_with_method(data, methods[m], q, lambda, seed);
                Alignment a = align_signatures(S, ds.truth_signatures.S);
                row.mean_sam_deg = a.mean_sam;
                row.mean_rmse_cm = a.mean_rmse;
            } catch (const std::exception& e) {
                row.failed = true;
                row.error = e.what();
            }
        }
    });

    for (double sd : sd_grid)
        for (const std::string& method : methods) {
            SweepSummary s;
            s.sd_percent = sd;
            s.method = method;
            std::vector<double> sams, rmses;
            for (const SweepRow& r : res.rows) {
                if (r.sd_percent != sd || r.method != method) continue;
                if (r.failed) {
                    ++s.failures;
                    continue;
                }
                sams.push_back(r.mean_sam_deg);
                rmses.push_back(r.mean_rmse_cm);
            }
            if (!sams.empty()) {
                s.sam_median = median(sams);
                s.sam_q1 = quantile(sams, 0.25);
                s.sam_q3 = quantile(sams, 0.75);
                s.rmse_median = median(rmses);
                s.rmse_q1 = quantile(rmses, 0.25);
                s.rmse_q3 = quantile(rmses, 0.75);
            }
            res.summaries.push_back(std::move(s));
        }
    return res;
}

std::string sweep_csv(const SweepResult& res) {
    std::ostringstream out;
    out << "sd_percent,seed,method,scenario_hash,config_hash,mean_sam_deg,"
           "mean_rmse_cm,status,error\n";
    for (const SweepRow& r : res.rows)
        out << format_double(r.sd_percent) << "," << r.seed << "," << r.method << ","
            << r.scenario_hash << "," << r.config_hash << ","
            << format_double(r.mean_sam_deg) << "," << format_double(r.mean_rmse_cm)
            << "," << (r.failed ? "failed" : "ok") << "," << csv_quote(r.error) << "\n";
    return out.str();
}

std::string sweep_summary_csv(const SweepResult& res) {
    std::ostringstream out;
    out << "sd_percent,method,sam_median,sam_q1,sam_q3,rmse_median,rmse_q1,"
           "rmse_q3,failures\n";
    for (const SweepSummary& s : res.summaries)
        out << format_double(s.sd_percent) << "," << s.method << ","
            << format_double(s.sam_median) << "," << format_double(s.sam_q1) << ","
            << format_double(s.sam_q3) << "," << format_double(s.rmse_median) << ","
            << format_double(s.rmse_q1) << "," << format_double(s.rmse_q3) << ","
            << s.failures << "\n";
    return out.str();
}

CompareResult run_method_comparison(const Scenario& base,
                                    const std::vector<double>& sd_grid,
                                    const std::vector<std::uint64_t>& seeds,
                                    double lambda, int jobs) {
    if (seeds.size() < 3) throw SpecError("run_method_comparison: need >= 3 seeds");
    if (sd_grid.empty()) throw SpecError("run_method_comparison: empty sd grid");
    const std::vector<std::string> methods = {"hyperion", "nmf", "spa"};
    const int q = static_cast<int>(base.materials.size());
    const int n_cells = static_cast<int>(sd_grid.size() * seeds.size());

    CompareResult res;
    for (const MaterialSpec& m : base.materials) res.materials.push_back(m.label);
    res.rows.resize(n_cells * methods.size());
    parallel_for(n_cells, jobs, [&](int cell) {
        const double sd = sd_grid[cell / seeds.size()];
        const std::uint64_t seed = seeds[cell % seeds.size()];
        Scenario sc = base;
        sc.noise.sd_percent = sd;
        sc.seed = seed;
        const std::string sc_hash = fnv1a_hex(format_scenario(sc));

        SynthDataset ds;
        StandardizedData data;
        std::string gen_error;
        try {
            ds = build_dataset(sc);
            data = standardize(ds.spectra);
        } catch (const std::exception& e) {
            gen_error = e.what();
        }
        for (size_t m = 0; m < methods.size(); ++m) {
            CompareRow& row = res.rows[cell * methods.size() + m];
            row.sd_percent = sd;
            row.seed = seed;
            row.method = methods[m];
            row.scenario_hash = sc_hash;
            row.config_hash = config_hash_for(methods[m], q, lambda, seed);
            if (!gen_error.empty()) {
                row.failed = true;
                row.error = gen_error;
                continue;
            }
            auto start = std::chrono::steady_clock::now();
            try {
                Mat S = unmix_with_method(data, methods[m], q, lambda, seed);
                Alignment a = align_signatures(S, ds.truth_signatures.S);
                row.rmse_cm = a.rmse_cm;
            } catch (const std::exception& e) {
                row.failed = true;
                row.error = e.what();
            }
            row.wall_time_s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
        }
    });
    return res;
}

std::string compare_csv(const CompareResult& res) {
    std::ostringstream out;
    out << "sd_percent,seed,method,scenario_hash,config_hash";
    for (const std::string& m : res.materials) out << ",rmse_" << m;
    out << ",wall_time_s,status,error\n";
    for (const CompareRow& r : res.rows) {
        out << format_double(r.sd_percent) << "," << r.seed << "," << r.method << ","
            << r.scenario_hash << "," << r.config_hash;
        for (size_t j = 0; j < res.materials.size(); ++j)
            out << "," << (j < r.rmse_cm.size() ? format_double(r.rmse_cm[j]) : "");
        out << "," << format_double(r.wall_time_s) << ","
            << (r.failed ? "failed" : "ok") << "," << csv_quote(r.error) << "\n";
    }
    return out.str();
}

ValidationResult run_model_validation(const Scenario& scenario) {
    SynthDataset ds = build_dataset(scenario);
    StandardizedData data = standardize(ds.spectra);
    const Mat& T = ds.truth_abundances.matrix();
    const int q = static_cast<int>(T.rows());
    const int l = static_cast<int>(T.cols());

    std::vector<int> pure_of(q, -1);
    for (int n = 0; n < l; ++n)
        for (int m = 0; m < q; ++m)
            if (T(m, n) == 1.0) pure_of[m] = n;
    for (int m = 0; m < q; ++m)
        if (pure_of[m] < 0)
            throw SpecError("run_model_validation: no pure sample for material '" +
                            ds.truth_signatures.labels[m] + "'");

    ValidationResult res;
    std::vector<int> all(l);
    for (int n = 0; n < l; ++n) all[n] = n;
    res.pca = pca_project_2d(data.X, all);
    res.labels = data.labels;
    for (int n = 0; n < l; ++n) {
        if (T.col(n).maxCoeff() == 1.0) continue;  // pures are the reference
        Vec sim = Vec::Zero(data.bands());
        for (int m = 0; m < q; ++m) sim += T(m, n) * data.X.col(pure_of[m]);
        ValidationRow row;
        row.label = data.labels[n];
        row.sam_deg = sam_degrees(sim, data.X.col(n));
        row.rmse_cm = rmse(sim, data.X.col(n));
        res.rows.push_back(std::move(row));
    }
    return res;
}

std::string validation_csv(const ValidationResult& res) {
    std::ostringstream out;
    out << "mixture,sam_deg,rmse_cm\n";
    for (const ValidationRow& r : res.rows)
        out << r.label << "," << format_double(r.sam_deg) << ","
            << format_double(r.rmse_cm) << "\n";
    return out.str();
}

double quantile(std::vector<double> v, double p) {
    if (v.empty()) throw SpecError("quantile: empty sample");
    std::sort(v.begin(), v.end());
    double pos = p * (v.size() - 1);
    size_t lo = static_cast<size_t>(pos);
    if (lo + 1 >= v.size()) return v.back();
    double frac = pos - lo;
    return v[lo] * (1 - frac) + v[lo + 1] * frac;
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

}  // namespace hyperion
