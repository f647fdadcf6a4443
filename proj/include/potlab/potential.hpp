#pragma once

#include "potlab/calculus.hpp"

namespace potlab {

struct EquilibriumData {
    std::vector<int> U;  // interior indices
    ScalarField h;       // equilibrium potential: 1 on U, 0 on boundary, harmonic elsewhere
    double cap;          // Dirichlet energy of h
    ScalarField nu_U;    // equilibrium measure per vertex (mu * Laplacian h), >= 0
};

// Exact minimizer of the capacity quadratic program.
EquilibriumData capacity(const Operators& ops, const std::vector<int>& U);

struct SuperharmonicVerdict {
    bool ok;
    double worst_margin;  // most negative slack found (>= -tol when ok)
};

// Checks Laplacian f >= -tol pointwise and e^{-t Laplacian} f <= f + tol for sampled t.
SuperharmonicVerdict is_superharmonic(const Operators& ops, const ScalarField& f,
                                      const std::vector<double>& t_samples);

struct HtauCheck {
    double lhs;    // || d(h^tau) ||^2
    double rhs;    // tau^2/(2tau-1) * cap
    double ratio;  // lhs / rhs
};
HtauCheck htau_energy_check(const Operators& ops, const EquilibriumData& eq, double tau);

// Largest generalized eigenvalue of the h-based Hardy density (weight h^delta) against the
// h^delta-weighted Dirichlet form. The density lives on interior-interior edges and is
// aggregated to vertices by half-edge splitting.
double hardy_constant(const Operators& ops, const ScalarField& h, double delta);

// inf { sum_e omega_e |d chi|^2 a_e : chi = 1 on K, chi = 0 on far } — a relative-capacity
// diagnostic of parabolic behavior for the edge weight omega (per edge multiplier of a_e).
double parabolicity_diagnostic(const Operators& ops, const Eigen::VectorXd& omega_edge,
                               const std::vector<int>& K, const std::vector<int>& far);

}  // namespace potlab
