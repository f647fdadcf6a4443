#include "potlab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace potlab {

namespace {

// Interior indices of a ball's members.
std::vector<int> interior_members(const GraphSpace& s, const Ball& b) {
    std::vector<int> out;
    for (int v : b.members) {
        int i = s.interior_index(v);
        if (i >= 0) out.push_back(i);
    }
    return out;
}

double weighted_mean(const GraphSpace& s, const Eigen::VectorXd& f, const std::vector<int>& idx) {
    double num = 0.0, den = 0.0;
    for (int i : idx) {
        num += f[i] * s.mu()[i];
        den += s.mu()[i];
    }
    return den == 0.0 ? 0.0 : num / den;
}

double set_min(const Eigen::VectorXd& f, const std::vector<int>& idx) {
    double m = std::numeric_limits<double>::infinity();
    for (int i : idx) m = std::min(m, f[i]);
    return m;
}

}  // namespace

double a1_constant(const GraphSpace& s, const Weight& omega, const std::vector<Ball>& balls) {
    if ((omega.array() <= 0.0).any()) throw InputError("weight must be strictly positive");
    double best = 1.0;
    for (const Ball& b : balls) {
        std::vector<int> idx = interior_members(s, b);
        if (idx.empty()) continue;
        best = std::max(best, weighted_mean(s, omega, idx) / set_min(omega, idx));
    }
    return best;
}

A1Derived a1_derived_properties(const GraphSpace& s, const Weight& omega,
                                const std::vector<Ball>& balls) {
    A1Derived out{1.0, 1.0, 1.0};
    for (const Ball& b : balls) {
        std::vector<int> idx = interior_members(s, b);
        Ball b2 = make_ball(s, b.center, 2.0 * b.radius);
        std::vector<int> idx2 = interior_members(s, b2);
        if (idx.empty() || idx2.empty()) continue;
        double int1 = 0.0, int2 = 0.0;
        for (int i : idx) int1 += omega[i] * s.mu()[i];
        for (int i : idx2) int2 += omega[i] * s.mu()[i];
        if (int1 > 0.0) out.d_measure = std::max(out.d_measure, int2 / int1);
        double inf1 = set_min(omega, idx), inf2 = set_min(omega, idx2);
        if (inf2 > 0.0) out.d_inf = std::max(out.d_inf, inf1 / inf2);
        double m1 = weighted_mean(s, omega, idx), m2 = weighted_mean(s, omega, idx2);
        if (m1 > 0.0) out.d_mean = std::max(out.d_mean, m2 / m1);
    }
    return out;
}

ReverseHolderReport reverse_holder_check(const GraphSpace& s, const Weight& omega, double r,
                                         const std::vector<Ball>& balls) {
    if (r <= 1.0) throw InputError("reverse Holder exponent must exceed 1");
    Weight pow_r = omega.array().pow(r).matrix();
    ReverseHolderReport rep;
    rep.a1_of_pow = a1_constant(s, pow_r, balls);
    rep.value = 0.0;
    for (const Ball& b : balls) {
        std::vector<int> idx = interior_members(s, b);
        if (idx.empty()) continue;
        double mean1 = weighted_mean(s, omega, idx);
        double meanr = weighted_mean(s, pow_r, idx);
        if (mean1 > 0.0) rep.value = std::max(rep.value, std::pow(meanr, 1.0 / r) / mean1);
    }
    rep.bound = std::pow(rep.a1_of_pow, 1.0 / r) * (1.0 + 1e-9);
    rep.ok = rep.value <= rep.bound;
    return rep;
}

namespace {

struct HarnackBall {
    std::vector<int> b, b2, b3;  // interior indices of B, 2B, 3B
    std::vector<int> pinned;     // interior indices pinned during the harmonic solve
    std::vector<int> ring;       // positions (within pinned) that receive random data
};

std::vector<HarnackBall> admissible_harnack_balls(const GraphSpace& s,
                                                  const std::vector<Ball>& balls) {
    std::vector<HarnackBall> out;
    for (const Ball& b : balls) {
        Ball b3 = make_ball(s, b.center, 3.0 * b.radius);
        bool all_interior = true;
        for (int v : b3.members)
            if (!s.is_interior(v)) all_interior = false;
        if (!all_interior) continue;
        std::vector<char> inside(static_cast<std::size_t>(s.n()), 0);
        for (int v : b3.members) inside[static_cast<std::size_t>(v)] = 1;
        HarnackBall hb;
        hb.b = interior_members(s, b);
        hb.b2 = interior_members(s, make_ball(s, b.center, 2.0 * b.radius));
        hb.b3 = interior_members(s, b3);
        std::vector<char> is_ring(static_cast<std::size_t>(s.n()), 0);
        for (int v : b3.members)
            for (auto [w, e] : s.neighbors(v)) {
                (void)e;
                if (!inside[static_cast<std::size_t>(w)]) is_ring[static_cast<std::size_t>(v)] = 1;
            }
        // pin the ring plus every interior vertex outside 3B (so the solve is local to 3B)
        for (int i = 0; i < s.interior_count(); ++i) {
            int v = s.vertex_of(i);
            if (!inside[static_cast<std::size_t>(v)]) {
                hb.pinned.push_back(i);
            } else if (is_ring[static_cast<std::size_t>(v)]) {
                hb.ring.push_back(static_cast<int>(hb.pinned.size()));
                hb.pinned.push_back(i);
            }
        }
        if (hb.ring.empty() || hb.b.empty()) continue;
        out.push_back(std::move(hb));
    }
    return out;
}

struct HarnackStats {
    double ratio = 1.0;
    double alpha_fit = 1.0;
    bool has_alpha = false;
    double mean_g_b = 0.0, mean_g_b2 = 0.0, mean_g_b3 = 0.0;
    std::vector<double> mean_gp_b;  // mean over B of |dpsi|^p for the exponent grid
};

const std::vector<double> kPGrid{2.25, 2.5, 2.75, 3.0, 3.25, 3.5, 3.75, 4.0};

HarnackStats sample_stats(const Operators& ops, const HarnackBall& hb, Rng& rng) {
    const GraphSpace& s = ops.space();
    Eigen::VectorXd vals = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(hb.pinned.size()));
    for (int k : hb.ring) vals[k] = std::exp(rng.uniform(0.0, std::log(100.0)));
    ScalarField psi = pinned_solve(ops, hb.pinned, vals);
    HarnackStats st;
    double mx = -std::numeric_limits<double>::infinity(), mn = -mx;
    for (int i : hb.b) {
        mx = std::max(mx, psi[i]);
        mn = std::min(mn, psi[i]);
    }
    st.ratio = mn > 0.0 ? mx / mn : std::numeric_limits<double>::infinity();
    double mx3 = -std::numeric_limits<double>::infinity(), mn3 = -mx3;
    for (int i : hb.b3) {
        mx3 = std::max(mx3, psi[i]);
        mn3 = std::min(mn3, psi[i]);
    }
    double osc = mx - mn, osc3 = mx3 - mn3;
    if (osc3 > 1e-13 * std::max(1.0, mx3)) {
        st.has_alpha = true;
        st.alpha_fit = osc > 0.0 ? std::log(osc3 / osc) / std::log(3.0) : 1.0;
        st.alpha_fit = std::min(1.0, std::max(1e-3, st.alpha_fit));
    }
    ScalarField g = ops.edge_energy_density(ops.d(psi));
    st.mean_g_b = weighted_mean(s, g, hb.b);
    st.mean_g_b2 = weighted_mean(s, g, hb.b2);
    st.mean_g_b3 = weighted_mean(s, g, hb.b3);
    for (double p : kPGrid)
        st.mean_gp_b.push_back(weighted_mean(s, g.array().pow(0.5 * p).matrix(), hb.b));
    return st;
}

}  // namespace

HarnackProfile harnack_estimate(const Operators& ops, const std::vector<Ball>& balls,
                                int n_harmonics, Rng& rng) {
    const GraphSpace& s = ops.space();
    std::vector<HarnackBall> hballs = admissible_harnack_balls(s, balls);
    if (hballs.empty())
        throw InputError("no admissible balls: tripled balls must stay inside the interior");
    std::vector<HarnackStats> stats;
    for (const HarnackBall& hb : hballs)
        for (int k = 0; k < n_harmonics; ++k) stats.push_back(sample_stats(ops, hb, rng));

    HarnackProfile prof;
    prof.admissible_balls = static_cast<int>(hballs.size());
    double alpha = 1.0;
    for (const HarnackStats& st : stats) {
        prof.harnack_C = std::max(prof.harnack_C, st.ratio);
        if (st.has_alpha) alpha = std::min(alpha, st.alpha_fit);
    }
    prof.holder_alpha = alpha;
    double theta_pow = std::pow(1.0 / 3.0, 2.0 - 2.0 * alpha);
    for (const HarnackStats& st : stats)
        if (st.mean_g_b3 > 0.0)
            prof.grad_decay_C = std::max(prof.grad_decay_C, theta_pow * st.mean_g_b / st.mean_g_b3);
    double pplus = 2.0;
    for (std::size_t j = 0; j < kPGrid.size(); ++j) {
        bool ok = true;
        for (const HarnackStats& st : stats) {
            if (st.mean_g_b2 <= 0.0) continue;
            double lhs = std::pow(st.mean_gp_b[j], 1.0 / kPGrid[j]);
            if (lhs > 10.0 * std::sqrt(st.mean_g_b2)) ok = false;
        }
        if (ok)
            pplus = kPGrid[j];
        else
            break;
    }
    prof.rh_exponent_pplus = pplus;
    return prof;
}

GradientRHReport green_weighted_gradient_rh(const Operators& ops, int o_vertex,
                                            const std::vector<Ball>& balls, const ScalarField& h,
                                            int n_harmonics, Rng& rng) {
    const GraphSpace& s = ops.space();
    GradientRHReport rep;
    rep.profile = harnack_estimate(ops, balls, n_harmonics, rng);
    double alpha = rep.profile.holder_alpha;
    double q_cap = alpha < 1.0 ? 0.99 * 2.0 / (1.0 - alpha) : rep.profile.rh_exponent_pplus;
    double q = std::min(rep.profile.rh_exponent_pplus, q_cap);
    if (q <= 2.0) return rep;  // not applicable; the profile is attached
    rep.applicable = true;
    rep.q = q;

    int oi = s.interior_index(o_vertex);
    if (oi < 0) throw InputError("Green pole must be an interior vertex");
    ScalarField G = ops.green_column(oi);
    if ((h.array() <= 0.0).any()) throw InputError("equilibrium weight must be positive");
    ScalarField h_half = h.cwiseSqrt();

    for (const HarnackBall& hb : admissible_harnack_balls(s, balls)) {
        for (int k = 0; k < n_harmonics; ++k) {
            Eigen::VectorXd vals = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(hb.pinned.size()));
            for (int r : hb.ring) vals[r] = std::exp(rng.uniform(0.0, std::log(100.0)));
            ScalarField psi = pinned_solve(ops, hb.pinned, vals);
            ScalarField g = ops.edge_energy_density(ops.d(psi));
            ScalarField gq = g.array().pow(0.5 * q).matrix();
            double base = weighted_mean(s, g, hb.b2);
            if (base <= 0.0) continue;
            double rhs_pow = std::pow(base, 0.5 * q);
            double lhs_g = weighted_mean(s, ScalarField(G.cwiseProduct(gq)), hb.b);
            double inf_g = set_min(G, hb.b);
            if (inf_g > 0.0) rep.c_green = std::max(rep.c_green, lhs_g / (inf_g * rhs_pow));
            for (int t = 0; t < 2; ++t) {
                const ScalarField& w = t == 0 ? h_half : h;
                double wm = weighted_mean(s, w, hb.b);
                if (wm <= 0.0) continue;
                double lhs_h = weighted_mean(s, ScalarField(w.cwiseProduct(gq)), hb.b) / wm;
                double& slot = t == 0 ? rep.c_h_half : rep.c_h_one;
                slot = std::max(slot, lhs_h / rhs_pow);
            }
        }
    }
    return rep;
}

std::vector<SweepRow> weighted_hodge_sweep(const Operators& ops, const ScalarField& h,
                                           const std::vector<double>& delta_list, Rng& rng,
                                           double tol_disc) {
    if ((h.array() <= 0.0).any()) throw InputError("sweep weight must be strictly positive");
    std::vector<SweepRow> rows;
    for (double delta : delta_list) {
        if (delta <= -1.0 || delta > 1.5 || delta == 1.0)
            throw InputError("sweep exponent must lie in (-1,1) or (1,1.5]");
        Eigen::VectorXd omega = h.array().pow(delta).matrix();
        double norm = hodge_weighted_norm(ops, omega, rng);
        SweepRow row{delta, norm, std::numeric_limits<double>::infinity(),
                     std::numeric_limits<double>::infinity()};
        if (std::abs(delta) < 1.0) {
            double ad = std::abs(delta);
            row.bound = std::pow((1.0 + ad) / (1.0 - ad), 2.0) * (1.0 + tol_disc);
            row.slack = row.bound - norm * norm;
            if (row.slack < 0.0)
                throw AssertionError("weighted-projector-bound",
                                     "norm^2 " + std::to_string(norm * norm) + " exceeds " +
                                         std::to_string(row.bound) + " at exponent " +
                                         std::to_string(delta));
        }
        rows.push_back(row);
    }
    return rows;
}

std::pair<double, double> extsh_energy_check(const Operators& ops, const ScalarField& w,
                                             const EdgeField& beta) {
    ScalarField rhs = ops.incidence().transpose() * ops.edge_weight().cwiseProduct(beta).eval();
    ScalarField phi = ops.stiffness_solve(rhs);
    ScalarField dens = ops.edge_energy_density(ops.d(phi));
    double lhs = w.cwiseProduct(dens).dot(ops.space().mu());
    double r = w.cwiseProduct(phi).dot(rhs);
    return {lhs, r};
}

}  // namespace potlab
