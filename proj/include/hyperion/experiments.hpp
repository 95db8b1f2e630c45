#ifndef HYPERION_EXPERIMENTS_HPP
#define HYPERION_EXPERIMENTS_HPP

#include "hyperion/synth.hpp"
#include "hyperion/types.hpp"

namespace hyperion {

/// FNV-1a 64-bit hash rendered as 16 hex digits; keys result rows to the
/// exact inputs that produced them.
std::string fnv1a_hex(const std::string& text);

/// Run one unmixing method ("hyperion", "nmf", "spa") on standardized data
/// and return the k x q signature estimates (truth order not implied).
Mat unmix_with_method(const StandardizedData& data, const std::string& method,
                      int q, double lambda, std::uint64_t seed);

struct SweepRow {
    double sd_percent = 0;
    std::uint64_t seed = 0;
    std::string method;
    std::string scenario_hash;
    std::string config_hash;
    double mean_sam_deg = 0;
    double mean_rmse_cm = 0;
    bool failed = false;
    std::string error;
};

struct SweepSummary {
    double sd_percent = 0;
    std::string method;
    double sam_median = 0, sam_q1 = 0, sam_q3 = 0;
    double rmse_median = 0, rmse_q1 = 0, rmse_q3 = 0;
    int failures = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<SweepSummary> summaries;
};

/// Per (sd, seed, method) cell: regenerate the scenario at that noise level
/// and seed, unmix, align against ground truth. Cell failures are recorded,
/// never fatal. Requires >= 3 seeds.
SweepResult run_noise_sweep(const Scenario& base, const std::vector<double>& sd_grid,
                            const std::vector<std::uint64_t>& seeds,
                            const std::vector<std::string>& methods,
                            double lambda = 1.0, int jobs = 1);
std::string sweep_csv(const SweepResult& res);
std::string sweep_summary_csv(const SweepResult& res);

struct CompareRow {
    double sd_percent = 0;
    std::uint64_t seed = 0;
    std::string method;
    std::string scenario_hash;
    std::string config_hash;
    std::vector<double> rmse_cm;  // per material, ground-truth order
    double wall_time_s = 0;       // reported, never asserted
    bool failed = false;
    std::string error;
};

struct CompareResult {
    std::vector<std::string> materials;
    std::vector<CompareRow> rows;
};

CompareResult run_method_comparison(const Scenario& base,
                                    const std::vector<double>& sd_grid,
                                    const std::vector<std::uint64_t>& seeds,
                                    double lambda = 1.0, int jobs = 1);
std::string compare_csv(const CompareResult& res);

struct ValidationRow {
    std::string label;
    double sam_deg = 0;
    double rmse_cm = 0;
};

struct ValidationResult {
    std::vector<ValidationRow> rows;  // mixtures only
    Mat pca;                          // 2 x l, every sample
    std::vector<std::string> labels;  // per pca column
};

/// Linear-model check: each mixture column against the convex combination of
/// the pure columns it was built from. Scenario must contain a pure sample
/// for every material.
ValidationResult run_model_validation(const Scenario& scenario);
std::string validation_csv(const ValidationResult& res);

double median(std::vector<double> v);
double quantile(std::vector<double> v, double p);

}  // namespace hyperion

#endif
