#ifndef HYPERION_UNMIX_HPP
#define HYPERION_UNMIX_HPP

#include "hyperion/geometry.hpp"
#include "hyperion/preprocess.hpp"
#include "hyperion/types.hpp"

namespace hyperion {

struct HyperionConfig {
    int q = 3;
    double lambda = 1.0;
    int max_iters = 500;
    double rel_tol = 1e-8;
    std::uint64_t seed = 0;
};

struct HyperionResult {
    SignatureSet signatures;
    AbundanceMatrix abundances;
    Mat S_tilde;      // (q-1) x q preconditioned signatures
    Mat U;            // (q-1) x (q-1) unitary
    std::vector<double> objective_trace;
    Ellipsoid ellipsoid;
    Vec affine_mean;
    Mat affine_basis;
    std::string diagnostic;  // nonempty if the loop stopped on a rejected step
};

/// Full pipeline: affine fit -> hull -> LJE -> precondition -> alternating
/// optimization (S, T, U) -> back-transform of the simplex corners. The
/// alternating loop is run from two deterministic starts (anchor simplex and
/// its antipodal image); the lower final objective is returned.
HyperionResult hyperion_unmix(const StandardizedData& data, const HyperionConfig& cfg);

/// Closed-form S subproblem: [CX T' + lambda alpha U'S0][T T' + lambda I]^-1.
Mat update_S(const Mat& CX, const Mat& T_tilde, const Mat& U, double alpha,
             const Mat& S0, double lambda);
Mat update_S(const Mat& CX, const AbundanceMatrix& T_tilde, const Mat& U,
             double alpha, const Mat& S0, double lambda);

/// Columnwise fully constrained least squares (t >= 0, 1't = 1), solved
/// exactly by support enumeration (q <= 16).
AbundanceMatrix update_T(const Mat& CX, const Mat& S_tilde);
Vec fcls_simplex(const Mat& A, const Vec& y);

/// Data-fit plus lambda-weighted regularizer; the quantity the alternating
/// updates descend on.
double hyperion_objective(const Mat& CX, const Mat& S_tilde, const Mat& T_tilde,
                          const Mat& U, double alpha, const Mat& S0, double lambda);

/// Unitary factor maximizing trace(U S_tilde S0'), from the SVD of S_tilde S0'.
Mat update_U(const Mat& S_tilde, const Mat& S0);

/// s_j = mean + basis (F s~_j + c): inverse of the affine-fit/precondition chain.
SignatureSet recover_signatures(const Mat& S_tilde, const Ellipsoid& e,
                                const Vec& mean, const Mat& basis,
                                const FrequencyGrid& grid,
                                const std::vector<std::string>& labels = {});

/// phi(S~) = ||S~ - alpha U' S0||_F^2.
double regularizer_value(const Mat& S_tilde, const Mat& U, double alpha, const Mat& S0);

}  // namespace hyperion

#endif
