#pragma once

#include "potlab/potential.hpp"

#include <optional>

namespace potlab {

enum class TraceFamily { Balls, BallsAndSublevels, Exhaustive };

TraceFamily trace_family_from_string(const std::string& name);

inline constexpr int kExhaustiveLimit = 14;

struct TraceConstants {
    double C1 = 0.0;          // best constant in  sum q phi^2 mu <= C1 * energy(phi)
    double opnorm_sq = 0.0;   // same number computed through the spectral route
    double C3_family = 0.0;   // sup over the test family of  sum_U q mu / cap(U)
    std::optional<double> C3_exhaustive;
    double C4 = 0.0;          // sup of  ||solve(q 1_U)||^2-type energy / sum_U q mu
    double C5 = 0.0;          // sup of  sqrt(same energy / cap(U))
    std::string family_descriptor;
    std::vector<std::pair<std::string, bool>> verdicts;
    bool all_ok = true;
};

// Best trace constant: largest eigenvalue of the mu-symmetric operator obtained by
// sandwiching multiplication by q between two inverse square roots of the Laplacian
// (computed through the stiffness solve; exact on the finite model).
double trace_c1(const Operators& ops, const ScalarField& q);

double trace_c3(const Operators& ops, const ScalarField& q, TraceFamily family);

std::pair<double, double> trace_c4_c5(const Operators& ops, const ScalarField& q,
                                      TraceFamily family);

// Computes all constants on one family (exhaustive when the interior allows it) and
// asserts the mutual-control chain: C3 <= C5 <= C4 <= C1, the two-route agreement of
// C1, and (exhaustive only) C1 <= 4*C3.
TraceConstants verify_trace_chain(const Operators& ops, const ScalarField& q);

struct TraceFKReport {
    double A;      // best constant of the ball-wise kernel-square testing condition
    double c1;     // trace_c1 for the same q
    double ratio;  // c1 / A (finite when A > 0)
};
TraceFKReport traceFK_sufficient(const Operators& ops, const ScalarField& q,
                                 const std::vector<Ball>& balls, double nu_amb);

struct TraceDPReport {
    double C_ii;     // pointwise: solve-root of Q^2 against Q
    double C_iii;    // ball-restricted energy against the local q mass
    double C_iv;     // radial-integral testing condition on Q_tilde
    double comp_lo;  // min and max of Q / Q_tilde (two-sided comparability)
    double comp_hi;
};
TraceDPReport traceDP_conditions(const Operators& ops, const ScalarField& q, double nu_amb);

}  // namespace potlab
