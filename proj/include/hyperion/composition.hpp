#ifndef HYPERION_COMPOSITION_HPP
#define HYPERION_COMPOSITION_HPP

#include "hyperion/lp.hpp"
#include "hyperion/types.hpp"

namespace hyperion {

/// r = argmin ||x - A r||_1 s.t. r >= 0, 1'r = 1, solved as an LP with slack
/// variables t (-t <= x - Ar <= t). The duality gap certifies optimality.
Vec estimate_composition(const Vec& x, const Mat& A, double gap_tol = 1e-8);
Vec estimate_composition(const Vec& x, const SignatureSet& library,
                         double gap_tol = 1e-8);

/// Columnwise batch over samples; returns q x l proportions.
Mat estimate_compositions(const Mat& X, const Mat& A, double gap_tol = 1e-8);

}  // namespace hyperion

#endif
