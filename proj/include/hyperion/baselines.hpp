#ifndef HYPERION_BASELINES_HPP
#define HYPERION_BASELINES_HPP

#include "hyperion/types.hpp"

namespace hyperion {

struct NmfResult {
    Mat W;           // k x rank
    Mat H;           // rank x l
    double D = 0;    // ||X - WH||_F / sqrt(n m)
    int best_trial = 0;
    std::vector<double> d_trace;  // per-iteration D of the best trial
};

struct NmfConfig {
    int trials = 10;
    int max_iters = 1000;
    std::uint64_t seed = 0;
};

/// Alternating nonnegative least squares (exact per-column NNLS half steps),
/// best of `trials` seeded restarts. D is non-increasing within a trial.
NmfResult nmf_als(const Mat& X, int rank, const NmfConfig& cfg = {});

/// Successive projection algorithm: greedily pick the max-norm column, then
/// project all columns onto its orthogonal complement. Returns the q indices.
std::vector<int> spa(const Mat& X, int q);

}  // namespace hyperion

#endif
