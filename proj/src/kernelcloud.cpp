#include "potlab/kernelcloud.hpp"

#include "potlab/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace potlab {

KernelMatrix assemble_k(const MetricMeasureCloud& cloud) {
    if (cloud.nu_amb() <= 1.0)
        throw TailDivergesError("kernel tail diverges: growth exponent <= 1");
    int n = cloud.n();
    KernelMatrix km;
    km.K.resize(n, n);
    km.K_half.resize(n, n);
    km.gamma = cloud.gamma();
    for (int x = 0; x < n; ++x) {
        const RadialProfile& prof = cloud.profile(x);
        for (int y = 0; y < n; ++y) {
            double d = cloud.dist(x, y);
            km.K(x, y) = prof.moment(d, 0.0);
            km.K_half(x, y) = prof.moment(0.5 * d, 0.0);
        }
    }
    return km;
}

Eigen::VectorXd kernel_apply(const MetricMeasureCloud& cloud, const Eigen::MatrixXd& K,
                             const Eigen::VectorXd& f) {
    return K * f.cwiseProduct(cloud.mass());
}

KsReport check_lemma_ks(const MetricMeasureCloud& cloud, const KernelMatrix& km) {
    int n = cloud.n();
    double g = km.gamma;
    KsReport rep{1.0, 0.0, std::numeric_limits<double>::infinity(), true};
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            double r = km.K(x, y) / km.K(y, x);
            rep.worst_sym_ratio = std::max(rep.worst_sym_ratio, std::max(r, 1.0 / r));
            double rh = km.K_half(x, y) / km.K(x, y);
            rep.worst_half_ratio = std::max(rep.worst_half_ratio, rh);
            double m = std::min((g * km.K(y, x) - km.K(x, y)) / (g * km.K(y, x)),
                                (km.K(x, y) - km.K(y, x) / g) / km.K(x, y));
            m = std::min(m, (g * km.K(x, y) - km.K_half(x, y)) / (g * km.K(x, y)));
            rep.margin = std::min(rep.margin, m);
        }
    rep.ok = rep.margin >= -1e-12;
    return rep;
}

KkReport check_lemma_kk(const MetricMeasureCloud& cloud, const KernelMatrix& km,
                        const std::vector<Eigen::VectorXd>& f_samples) {
    double g3 = 2.0 * std::pow(km.gamma, 3.0);
    KkReport rep{std::numeric_limits<double>::infinity(), true};
    for (const Eigen::VectorXd& f : f_samples) {
        if ((f.array() < 0.0).any()) throw InputError("kernel-square samples must be nonnegative");
        Eigen::VectorXd Kf = kernel_apply(cloud, km.K, f);
        Eigen::VectorXd Kg = kernel_apply(cloud, km.K, f.cwiseProduct(Kf));
        for (int x = 0; x < cloud.n(); ++x) {
            double lhs = Kf[x] * Kf[x], rhs = g3 * Kg[x];
            double scale = std::max({1e-300, lhs, rhs});
            rep.worst_margin = std::min(rep.worst_margin, (rhs - lhs) / scale);
        }
    }
    rep.ok = rep.worst_margin >= -1e-12;
    return rep;
}

namespace {

double weighted_matrix_norm(const MetricMeasureCloud& cloud, const Eigen::MatrixXd& K,
                            const Eigen::VectorXd& diag_w, std::uint64_t seed) {
    Eigen::VectorXd sq = cloud.mass().cwiseSqrt();
    Eigen::MatrixXd B = sq.asDiagonal() * K * diag_w.asDiagonal() * Eigen::MatrixXd(sq.asDiagonal());
    Rng rng(seed);
    auto apply = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        return B.transpose() * (B * v);
    };
    return std::sqrt(std::max(0.0, spectral_radius(apply, cloud.n(), rng, 1e-13, 200000).value));
}

}  // namespace

GenetraceReport genetrace_conditions(const MetricMeasureCloud& cloud, const KernelMatrix& km,
                                     const Eigen::VectorXd& q) {
    if ((q.array() < 0.0).any()) throw InputError("testing density must be nonnegative");
    int n = cloud.n();
    GenetraceReport rep{};
    rep.all_ok = true;
    double g = km.gamma;

    if (q.maxCoeff() == 0.0) {
        rep.qball_worst = 0.0;
        rep.verdicts = {{"Cprime-le-opnorm", true},
                        {"opnorm-le-2g7-kq", true},
                        {"kq-le-2g5-Ciii", true},
                        {"Ciii-le-(g+g10)-Cprime", true},
                        {"ball-mean-bound", true}};
        return rep;
    }

    double sigma = weighted_matrix_norm(cloud, km.K, q.cwiseSqrt(), 1301);
    rep.opnorm_sq = sigma * sigma;
    Eigen::VectorXd Q = kernel_apply(cloud, km.K, q);
    rep.kq_norm = weighted_matrix_norm(cloud, km.K, Q, 1303);

    Eigen::VectorXd KQ2 = kernel_apply(cloud, km.K, Q.cwiseProduct(Q));
    Eigen::VectorXd Kq = Q;  // K(q) by definition
    rep.C_iii = 0.0;
    for (int x = 0; x < n; ++x)
        if (Kq[x] > 0.0) rep.C_iii = std::max(rep.C_iii, KQ2[x] / Kq[x]);

    // ball family: per-center subsampled radii plus tail radii evaluated against the tail law
    struct BallEval {
        double s;
        double mean_q;
        double ratio;  // testing ratio, 0 when q vanishes on the ball
    };
    std::vector<BallEval> evals;
    for (int x = 0; x < n; ++x) {
        std::vector<double> radii(cloud.metric().row(x).begin(), cloud.metric().row(x).end());
        std::sort(radii.begin(), radii.end());
        radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
        std::vector<double> rsub;
        int n_r = std::min<int>(12, static_cast<int>(radii.size()));
        for (int k = 0; k < n_r; ++k)
            rsub.push_back(radii[static_cast<std::size_t>(
                (static_cast<int>(radii.size()) - 1) * (k + 1) / n_r)]);
        for (double f : {2.0, 4.0, 8.0}) rsub.push_back(f * cloud.R_cut());
        for (double s : rsub) {
            if (s <= 0.0) continue;
            std::vector<int> members;
            for (int y = 0; y < n; ++y)
                if (cloud.dist(x, y) <= s) members.push_back(y);
            if (members.empty()) continue;
            double mass_q = 0.0, mass = 0.0;
            Eigen::VectorXd qB = Eigen::VectorXd::Zero(n);
            for (int y : members) {
                mass_q += q[y] * cloud.mass()[y];
                mass += cloud.mass()[y];
                qB[y] = q[y];
            }
            BallEval be{s, mass_q / mass, 0.0};
            if (mass_q > 0.0) {
                Eigen::VectorXd u = kernel_apply(cloud, km.K, qB);
                double energy = 0.0;
                for (int y : members) energy += u[y] * u[y] * cloud.mass()[y];
                be.ratio = energy / mass_q;
            }
            evals.push_back(be);
        }
    }
    rep.C_prime = 0.0;
    for (const BallEval& be : evals) rep.C_prime = std::max(rep.C_prime, be.ratio);
    rep.qball_worst = std::numeric_limits<double>::infinity();
    double g6 = std::pow(g, 6.0);
    for (const BallEval& be : evals) {
        double bound = g6 * rep.C_prime / (be.s * be.s);
        rep.qball_worst = std::min(rep.qball_worst, (bound - be.mean_q) / bound);
    }

    const double tol = 1.0 + 1e-9;
    auto verdict = [&](const std::string& name, bool ok) {
        rep.verdicts.emplace_back(name, ok);
        rep.all_ok = rep.all_ok && ok;
    };
    verdict("Cprime-le-opnorm", rep.C_prime <= rep.opnorm_sq * tol);
    verdict("opnorm-le-2g7-kq", rep.opnorm_sq <= 2.0 * std::pow(g, 7.0) * rep.kq_norm * tol);
    verdict("kq-le-2g5-Ciii", rep.kq_norm <= 2.0 * std::pow(g, 5.0) * rep.C_iii * tol);
    verdict("Ciii-le-(g+g10)-Cprime",
            rep.C_iii <= (g + std::pow(g, 10.0)) * rep.C_prime * tol);
    verdict("ball-mean-bound", rep.qball_worst >= -1e-12);
    return rep;
}

EstikernelReport estikernel_sandwich(const RadialProfile& prof, const std::vector<double>& dists,
                                     double D, double s) {
    if (D <= 0.0 || s <= 0.0) throw InputError("sandwich parameters must be positive");
    if (prof.nu <= 2.0 * s)
        throw TailDivergesError("kernel-comparison tails diverge: growth exponent <= 2s");
    double kappa = std::max(1.0, prof.kappa());
    EstikernelReport rep;
    rep.c = 2.0 * std::exp(-1.0 / D);
    rep.C = 2.0 + kappa * std::pow(2.0, prof.nu + 1.0) *
                      truncated_heat_moment(1.0 / D, s - 0.5 * prof.nu);
    rep.worst_lo = std::numeric_limits<double>::infinity();
    rep.worst_hi = std::numeric_limits<double>::infinity();
    rep.pairs = static_cast<int>(dists.size());
    for (double d : dists) {
        double R = prof.moment(d, 2.0 * s - 1.0);
        double H = prof.heat_integral(d, D, s);
        rep.worst_lo = std::min(rep.worst_lo, H / (rep.c * R) - 1.0);
        rep.worst_hi = std::min(rep.worst_hi, 1.0 - H / (rep.C * R));
    }
    rep.ok = rep.worst_lo >= -1e-7 && rep.worst_hi >= -1e-7;
    return rep;
}

EstikernelReport estikernel_quadrature(const MetricMeasureCloud& cloud, double D, double s,
                                       int pair_sample, Rng& rng) {
    if (cloud.nu_amb() <= 2.0 * s)
        throw TailDivergesError("kernel-comparison tails diverge: growth exponent <= 2s");
    EstikernelReport rep;
    rep.c = 2.0 * std::exp(-1.0 / D);
    rep.C = 0.0;
    rep.worst_lo = std::numeric_limits<double>::infinity();
    rep.worst_hi = std::numeric_limits<double>::infinity();
    rep.pairs = 0;
    auto one = [&](int x, int y) {
        const RadialProfile& prof = cloud.profile(x);
        double kappa = std::max(1.0, prof.kappa());
        double C = 2.0 + kappa * std::pow(2.0, prof.nu + 1.0) *
                             truncated_heat_moment(1.0 / D, s - 0.5 * prof.nu);
        rep.C = std::max(rep.C, C);
        double d = cloud.dist(x, y);
        double R = prof.moment(d, 2.0 * s - 1.0);
        double H = prof.heat_integral(d, D, s);
        rep.worst_lo = std::min(rep.worst_lo, H / (rep.c * R) - 1.0);
        rep.worst_hi = std::min(rep.worst_hi, 1.0 - H / (C * R));
        rep.pairs += 1;
    };
    one(0, 0);  // diagonal case: no exponential factor, both sides the same moment
    for (int k = 0; k < pair_sample; ++k) {
        int x = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cloud.n())));
        int y = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cloud.n())));
        one(x, y);
    }
    rep.ok = rep.worst_lo >= -1e-7 && rep.worst_hi >= -1e-7;
    return rep;
}

}  // namespace potlab
