#pragma once

#include "potlab/calculus.hpp"
#include "potlab/potential.hpp"

namespace potlab {

// Largest ball mean / ball min over the scanned family (weight indexed by interior index;
// only interior ball members enter). Exact on finite spaces with the full radii family.
double a1_constant(const GraphSpace& s, const Weight& omega, const std::vector<Ball>& balls);

struct A1Derived {
    double d_measure;  // best D with  integral_{2B} omega dmu <= D integral_B omega dmu
    double d_inf;      // best D with  inf_B omega <= D inf_{2B} omega
    double d_mean;     // best D with  mean_{2B} omega <= D mean_B omega
};
A1Derived a1_derived_properties(const GraphSpace& s, const Weight& omega,
                                const std::vector<Ball>& balls);

struct ReverseHolderReport {
    double value;      // best constant in (mean_B omega^r)^{1/r} <= value * mean_B omega
    double a1_of_pow;  // certified flatness constant of omega^r over the same family
    double bound;      // a1_of_pow^{1/r} * (1 + 1e-9)
    bool ok;           // value <= bound
};
ReverseHolderReport reverse_holder_check(const GraphSpace& s, const Weight& omega, double r,
                                         const std::vector<Ball>& balls);

struct HarnackProfile {
    double harnack_C = 1.0;        // worst sup/inf over B among sampled positive harmonics
    double holder_alpha = 1.0;     // fitted oscillation-decay exponent, clamped to (0, 1]
    double rh_exponent_pplus = 2;  // largest p <= 4 with gradient reverse Holder constant <= 10
    double grad_decay_C = 1.0;     // constant in theta^{2-2alpha} mean_{theta B}|dpsi|^2 <= C mean_B
    int admissible_balls = 0;
};
// Samples positive harmonic functions on 3B (log-uniform boundary data in [1,100]) for
// every ball whose tripled ball stays inside the interior.
HarnackProfile harnack_estimate(const Operators& ops, const std::vector<Ball>& balls,
                                int n_harmonics, Rng& rng);

struct GradientRHReport {
    bool applicable = false;  // false: no admissible exponent q (profile attached anyway)
    double q = 0.0;
    double c_green = 0.0;   // Green-weighted gradient reverse Holder constant
    double c_h_half = 0.0;  // h^{1/2}-weighted variant
    double c_h_one = 0.0;   // h^{1}-weighted variant
    HarnackProfile profile;
};
GradientRHReport green_weighted_gradient_rh(const Operators& ops, int o_vertex,
                                            const std::vector<Ball>& balls, const ScalarField& h,
                                            int n_harmonics, Rng& rng);

struct SweepRow {
    double delta;
    double norm;   // weighted operator norm of the projector (not squared)
    double bound;  // bound on norm^2 for |delta| < 1; +inf in the trend-only range
    double slack;  // bound - norm^2
};
// Weighted projector norm with vertex weight h^delta lifted to edges. For |delta| < 1 the
// squared norm is asserted against ((1+|d|)/(1-|d|))^2 * (1 + tol_disc); delta in (1, 1.5]
// is probed without an assertion (no explicit constant exists in that range).
std::vector<SweepRow> weighted_hodge_sweep(const Operators& ops, const ScalarField& h,
                                           const std::vector<double>& delta_list, Rng& rng,
                                           double tol_disc = 0.25);

// Proof-step energy inequality: with phi solving the weak equation L phi = D^T A beta and a
// superharmonic weight w, returns (lhs, rhs) of
//   sum |dphi|^2_halfsplit w mu  <=  sum phi (L phi) w.
std::pair<double, double> extsh_energy_check(const Operators& ops, const ScalarField& w,
                                             const EdgeField& beta);

}  // namespace potlab
