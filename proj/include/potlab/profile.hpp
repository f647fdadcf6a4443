#pragma once

#include "potlab/common.hpp"

#include <functional>

namespace potlab {

// Volume profile V(x,r): right-continuous nondecreasing step function on [0, R_cut]
// (the empirical ball mass), continued for r > R_cut by the analytic growth law
// V(R_cut) * (r/R_cut)^nu.
struct RadialProfile {
    std::vector<double> r;  // jump radii, sorted, r[0] == 0
    std::vector<double> V;  // V(rho) = V[j] for rho in [r[j], r[j+1])
    double R_cut = 1.0;
    double nu = 1.0;

    double V_cut() const { return V.back(); }

    double value(double rho) const;

    // ∫_{d0}^∞ rho^p / V(rho) d rho, piecewise exact; requires nu > p+1.
    double moment(double d0, double p) const;

    // ∫_0^∞ e^{-d²/(Dt)} / V(√t) * t^{s-1} dt; requires nu > 2s.
    // Empirical range by closed form (d=0) or adaptive quadrature, tail by incomplete gamma.
    double heat_integral(double d, double D, double s) const;

    // Smallest kappa with V(R) ≤ kappa (R/r)^nu V(r) for ALL real 0 < r ≤ R < ∞
    // (left limits at jumps included, tail included). This is the continuum-valid
    // doubling certificate the kernel lemmas need.
    double kappa() const;
    double gamma() const { return std::max(1.0, kappa()) * std::pow(2.0, nu); }
};

// Build a profile from the distances (from one center) and masses of the points of a
// finite model. R_cut must be >= 0; distances beyond R_cut are ignored (clipped region).
RadialProfile profile_from_distances(const Eigen::VectorXd& dists, const Eigen::VectorXd& masses,
                                     double R_cut, double nu);

// ∫_0^1 e^{-c/t} t^{beta-1} dt for beta < 0, c > 0 (closed form via incomplete gamma);
// used for the explicit kernel-comparison constant.
double truncated_heat_moment(double c, double beta);

// Adaptive Simpson quadrature (relative tolerance on the whole integral).
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace potlab
