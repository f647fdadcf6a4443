#pragma once

#include "potlab/calculus.hpp"

namespace potlab {

// A potential acting on test fields, either as a density (sum f phi psi mu) or in
// divergence form through an edge field (pairing against the differential).
struct Potential {
    enum class Kind { Function, DivergenceForm };
    Kind kind = Kind::Function;
    ScalarField f;     // Function kind
    EdgeField theta0;  // DivergenceForm kind

    static Potential function(ScalarField f) {
        Potential p;
        p.kind = Kind::Function;
        p.f = std::move(f);
        return p;
    }
    static Potential divergence_form(EdgeField theta0) {
        Potential p;
        p.kind = Kind::DivergenceForm;
        p.theta0 = std::move(theta0);
        return p;
    }
};

struct MVReport {
    double A = 0.0;           // bilinear form constant
    EdgeField theta;          // representing form
    double B = 0.0;           // multiplier constant of theta
    double ratio_forward = 0.0;  // A / (2 sqrt(B)); <= 1 up to tolerance
    double ratio_reverse = 0.0;  // B / A^2; a family constant, stable under refinement
    double capacitary_Cprime = 0.0;  // best C' with sum_U |theta|^2 mu <= C' A^2 cap(U) over balls
};

// Largest |eigenvalue| of the symmetric energy-normalized potential operator; the
// divergence representation is reduced weakly to its density.
double form_constant_A(const Operators& ops, const Potential& V);

// theta = d of the weak solution of (Laplacian phi = V).
EdgeField representing_form(const Operators& ops, const Potential& V);

// Best constant in  sum |theta|^2 phi^2 mu <= B * energy(phi), with the half-edge-split
// vertex aggregation of |theta|^2.
double multiplier_constant_B(const Operators& ops, const EdgeField& theta);

MVReport mv_verify(const Operators& ops, const Potential& V, const std::vector<Ball>& balls);

// Empirical decay exponent of phi_beta (the projector potential of a compactly supported
// edge field) against the pole's Green column, fitted outside B(o, 6R).
double decay_estimate_probe(const Operators& ops, const EdgeField& beta, int o_vertex, double R);

}  // namespace potlab
