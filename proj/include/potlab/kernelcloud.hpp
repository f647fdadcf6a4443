#pragma once

#include "potlab/cloud.hpp"

namespace potlab {

// Radial-integral kernel on a cloud: K(x,y) = int_{d(x,y)}^inf dtau / V(x,tau),
// piecewise-exact over the empirical profile plus the analytic tail. K_half uses the
// halved lower limit d(x,y)/2. (Kf)(x) = sum_y K(x,y) f(y) mass(y).
struct KernelMatrix {
    Eigen::MatrixXd K;
    Eigen::MatrixXd K_half;
    double gamma;  // the cloud's certified one-step doubling constant
};

KernelMatrix assemble_k(const MetricMeasureCloud& cloud);

// (Kf)(x) with the measure weights folded in.
Eigen::VectorXd kernel_apply(const MetricMeasureCloud& cloud, const Eigen::MatrixXd& K,
                             const Eigen::VectorXd& f);

struct KsReport {
    double worst_sym_ratio;   // max over pairs of K(x,y)/K(y,x) (>= 1 by symmetry of the scan)
    double worst_half_ratio;  // max over pairs of K_half(x,y)/K(x,y)
    double margin;            // min over both inequalities of (bound - value), >= -tol when ok
    bool ok;
};
// Near-symmetry and halved-kernel domination with the certified gamma, checked on all pairs.
KsReport check_lemma_ks(const MetricMeasureCloud& cloud, const KernelMatrix& km);

struct KkReport {
    double worst_margin;  // min over samples and points of 2 gamma^3 K(f Kf) - (Kf)^2, scaled
    bool ok;
};
// Pointwise quadratic kernel domination |Kf|^2 <= 2 gamma^3 K(f Kf) for nonnegative samples.
KkReport check_lemma_kk(const MetricMeasureCloud& cloud, const KernelMatrix& km,
                        const std::vector<Eigen::VectorXd>& f_samples);

struct GenetraceReport {
    double opnorm_sq;  // squared operator norm of f -> K(sqrt(q) f) on the weighted space
    double kq_norm;    // operator norm of f -> K(Q f) with Q = K(q)
    double C_iii;      // best pointwise constant in K(Q^2) <= C K(q) over the support
    double C_prime;    // best ball-testing constant in sum_B |K(q 1_B)|^2 mass <= C' sum_B q mass
    double qball_worst;  // worst ball margin of  mean_B q <= gamma^6 C'/s^2  (>= -tol when ok)
    std::vector<std::pair<std::string, bool>> verdicts;
    bool all_ok;
};
// Four-way testing-condition equivalence with its explicit directed control constants.
GenetraceReport genetrace_conditions(const MetricMeasureCloud& cloud, const KernelMatrix& km,
                                     const Eigen::VectorXd& q);

struct EstikernelReport {
    double c, C;         // the explicit sandwich constants evaluated from (kappa, nu, D, s)
    double worst_lo;     // min over pairs of H/(c R) - 1  (>= -tol when ok)
    double worst_hi;     // min over pairs of 1 - H/(C R)
    int pairs;
    bool ok;
};
// Heat-type integral vs radial integral sandwich on sampled pairs of one profile; the
// distances give the sampled separations d(x,y).
EstikernelReport estikernel_sandwich(const RadialProfile& prof, const std::vector<double>& dists,
                                     double D, double s);

// Cloud version: samples pair_sample ordered pairs (plus the diagonal of the first point).
EstikernelReport estikernel_quadrature(const MetricMeasureCloud& cloud, double D, double s,
                                       int pair_sample, Rng& rng);

}  // namespace potlab
