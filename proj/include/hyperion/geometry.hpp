#ifndef HYPERION_GEOMETRY_HPP
#define HYPERION_GEOMETRY_HPP

#include "hyperion/types.hpp"

namespace hyperion {

/// Intersection of halfspaces b_i'x <= h_i with unit-norm b_i.
/// Construction verifies nonemptiness and boundedness.
struct HPolytope {
    Mat B;   // H x p, rows are the unit normals
    Vec h;   // H
    int dim = 0;

    HPolytope() = default;
    HPolytope(Mat normals, Vec offsets);

    int facet_count() const { return static_cast<int>(h.size()); }
    bool contains(const Vec& x, double tol = 1e-9) const;
};

/// E = { F a + c : ||a|| <= 1 } with F symmetric positive definite.
struct Ellipsoid {
    Mat F;
    Vec c;

    Ellipsoid() = default;
    Ellipsoid(Mat shape, Vec center);
};

/// Facet halfspaces of conv{points}. Columns of `points` are the points.
/// Requires 2 <= p <= 5 and at most 500 points affinely spanning dimension p.
HPolytope convex_hull_halfspaces(const Mat& points);

/// Chebyshev center and radius of the polytope (largest inscribed ball).
std::pair<Vec, double> chebyshev_center(const HPolytope& poly);

/// Maximum-volume inscribed (Loewner-John) ellipsoid: maximize log det F
/// s.t. ||F b_i|| <= h_i - b_i'c. Damped Newton on the log barrier with a
/// path-following schedule; the duality gap certifies the objective to tol.
Ellipsoid lje(const HPolytope& poly, double tol = 1e-8);

/// Vertices of the unit-volume regular (q-1)-simplex centered at the origin,
/// as the columns of a (q-1) x q matrix.
Mat unit_volume_regular_simplex(int q);

/// alpha with alpha * S0 the regular simplex of inradius 1 (so its inscribed
/// ellipsoid is the unit ball).
double simplex_scale_alpha(int q);

/// C(v) = F^-1 (v - c), columnwise.
Mat precondition(const Mat& X, const Ellipsoid& e);
Vec precondition(const Vec& v, const Ellipsoid& e);

}  // namespace hyperion

#endif
