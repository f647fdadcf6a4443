#include "potlab/trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace potlab {

namespace {

void require_nonneg(const ScalarField& q) {
    if ((q.array() < 0.0).any()) throw InputError("trace density must be nonnegative");
}

// Deterministic test-set family over interior indices.
std::vector<std::vector<int>> candidate_sets(const Operators& ops, const ScalarField& q,
                                             TraceFamily family) {
    const GraphSpace& s = ops.space();
    int nI = ops.nI();
    std::set<std::vector<int>> seen;
    std::vector<std::vector<int>> out;
    auto push = [&](std::vector<int> U) {
        if (U.empty()) return;
        std::sort(U.begin(), U.end());
        if (seen.insert(U).second) out.push_back(std::move(U));
    };

    if (family == TraceFamily::Exhaustive) {
        if (nI > kExhaustiveLimit)
            throw InputError("exhaustive family limited to <= " +
                             std::to_string(kExhaustiveLimit) + " interior vertices");
        for (std::uint64_t mask = 1; mask < (1ULL << nI); ++mask) {
            std::vector<int> U;
            for (int i = 0; i < nI; ++i)
                if (mask & (1ULL << i)) U.push_back(i);
            push(std::move(U));
        }
        return out;
    }

    // balls: strided centers, a small deterministic radius subsample
    std::vector<double> radii = s.all_radii();
    std::vector<double> rsub;
    int n_r = std::min<int>(4, static_cast<int>(radii.size()));
    for (int k = 0; k < n_r; ++k)
        rsub.push_back(radii[static_cast<std::size_t>(
            (static_cast<int>(radii.size()) - 1) * (k + 1) / n_r)]);
    int stride = std::max(1, nI / 24);
    for (int i = 0; i < nI; i += stride)
        for (double r : rsub) push(s.ball_interior(s.vertex_of(i), r));

    if (family == TraceFamily::BallsAndSublevels) {
        // superlevel sets of the potentials the equivalence proof tests against
        std::vector<ScalarField> phis;
        phis.push_back(ops.green_apply(q));
        if (nI <= kSpectralLimit) phis.push_back(ops.frac_power_apply(-0.5, q));
        for (const ScalarField& phi : phis) {
            std::vector<double> vals(phi.data(), phi.data() + phi.size());
            std::sort(vals.begin(), vals.end());
            for (int k = 1; k <= 12; ++k) {
                double t = vals[static_cast<std::size_t>((vals.size() - 1) * k / 13)];
                std::vector<int> U;
                for (int i = 0; i < nI; ++i)
                    if (phi[i] > t) U.push_back(i);
                push(std::move(U));
            }
        }
    }
    return out;
}

struct SetScores {
    double mass;  // sum_U q mu
    double cap;
    double energy;  // mu-norm^2 of the half-power solve applied to q 1_U
};

SetScores score_set(const Operators& ops, const ScalarField& q, const std::vector<int>& U) {
    SetScores sc{0.0, 0.0, 0.0};
    const Eigen::VectorXd& mu = ops.space().mu();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(ops.nI());
    for (int i : U) {
        sc.mass += q[i] * mu[i];
        g[i] = q[i] * mu[i];
    }
    sc.cap = capacity(ops, U).cap;
    // ||half-power-solve(q 1_U)||_mu^2 = <g, L^{-1} g> with g = q 1_U mu
    sc.energy = g.dot(ops.stiffness_solve(g));
    return sc;
}

const char* family_name(TraceFamily f) {
    switch (f) {
        case TraceFamily::Balls: return "balls";
        case TraceFamily::BallsAndSublevels: return "balls_and_sublevels";
        default: return "exhaustive";
    }
}

}  // namespace

TraceFamily trace_family_from_string(const std::string& name) {
    if (name == "balls") return TraceFamily::Balls;
    if (name == "balls_and_sublevels") return TraceFamily::BallsAndSublevels;
    if (name == "exhaustive") return TraceFamily::Exhaustive;
    throw InputError("unknown test-set family: " + name);
}

double trace_c1(const Operators& ops, const ScalarField& q) {
    require_nonneg(q);
    if (q.maxCoeff() == 0.0) return 0.0;
    const Eigen::VectorXd& mu = ops.space().mu();
    Rng rng(97);
    auto apply = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        return ops.stiffness_solve(q.cwiseProduct(mu).cwiseProduct(v));
    };
    return spectral_radius(apply, ops.nI(), rng, 1e-13, 200000).value;
}

double trace_c3(const Operators& ops, const ScalarField& q, TraceFamily family) {
    require_nonneg(q);
    double best = 0.0;
    for (const auto& U : candidate_sets(ops, q, family)) {
        SetScores sc = score_set(ops, q, U);
        if (sc.cap > 0.0) best = std::max(best, sc.mass / sc.cap);
    }
    return best;
}

std::pair<double, double> trace_c4_c5(const Operators& ops, const ScalarField& q,
                                      TraceFamily family) {
    require_nonneg(q);
    double c4 = 0.0, c5sq = 0.0;
    for (const auto& U : candidate_sets(ops, q, family)) {
        SetScores sc = score_set(ops, q, U);
        if (sc.mass > 0.0) c4 = std::max(c4, sc.energy / sc.mass);
        if (sc.cap > 0.0) c5sq = std::max(c5sq, sc.energy / sc.cap);
    }
    return {c4, std::sqrt(c5sq)};
}

TraceConstants verify_trace_chain(const Operators& ops, const ScalarField& q) {
    require_nonneg(q);
    TraceConstants tc;
    TraceFamily family =
        ops.nI() <= kExhaustiveLimit ? TraceFamily::Exhaustive : TraceFamily::BallsAndSublevels;
    tc.family_descriptor = family_name(family);

    tc.C1 = trace_c1(ops, q);
    // independent spectral route to the same operator norm
    if (q.maxCoeff() == 0.0) {
        tc.opnorm_sq = 0.0;
    } else if (ops.nI() <= kSpectralLimit) {
        Rng rng(211);
        auto apply = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
            return ops.frac_power_apply(-0.5, q.cwiseProduct(ops.frac_power_apply(-0.5, v)));
        };
        tc.opnorm_sq = spectral_radius(apply, ops.nI(), rng, 1e-13, 200000).value;
    } else {
        Rng rng(211);
        const Eigen::VectorXd& mu = ops.space().mu();
        auto apply = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
            return ops.stiffness_solve(q.cwiseProduct(mu).cwiseProduct(v));
        };
        tc.opnorm_sq = spectral_radius(apply, ops.nI(), rng, 1e-13, 200000).value;
    }

    double c3 = 0.0, c4 = 0.0, c5sq = 0.0;
    for (const auto& U : candidate_sets(ops, q, family)) {
        SetScores sc = score_set(ops, q, U);
        if (sc.cap > 0.0) c3 = std::max(c3, sc.mass / sc.cap);
        if (sc.mass > 0.0) c4 = std::max(c4, sc.energy / sc.mass);
        if (sc.cap > 0.0) c5sq = std::max(c5sq, sc.energy / sc.cap);
    }
    tc.C3_family = c3;
    tc.C4 = c4;
    tc.C5 = std::sqrt(c5sq);
    if (family == TraceFamily::Exhaustive) tc.C3_exhaustive = c3;

    const double tol = 1.0 + 1e-9;
    auto verdict = [&](const std::string& name, bool ok) {
        tc.verdicts.emplace_back(name, ok);
        tc.all_ok = tc.all_ok && ok;
    };
    verdict("two-route-agreement", rel_diff(tc.C1, tc.opnorm_sq) <= 1e-9);
    verdict("C3-le-C5", tc.C3_family <= tc.C5 * tol + 1e-300);
    verdict("C5-le-C4", tc.C5 <= tc.C4 * tol + 1e-300);
    verdict("C4-le-C1", tc.C4 <= tc.C1 * tol + 1e-300);
    if (tc.C3_exhaustive) verdict("C1-le-4C3", tc.C1 <= 4.0 * *tc.C3_exhaustive * tol + 1e-300);
    return tc;
}

TraceFKReport traceFK_sufficient(const Operators& ops, const ScalarField& q,
                                 const std::vector<Ball>& balls, double nu_amb) {
    require_nonneg(q);
    if (nu_amb <= 2.0)
        throw TailDivergesError("testing-condition tails diverge: growth exponent <= 2");
    const GraphSpace& s = ops.space();
    double A = 0.0;
    for (const Ball& b : balls) {
        std::vector<int> idx;
        for (int v : b.members)
            if (s.interior_index(v) >= 0) idx.push_back(s.interior_index(v));
        if (idx.empty()) continue;
        double mass = 0.0;
        for (int i : idx) mass += q[i] * s.mu()[i];
        if (mass <= 0.0) continue;
        double lhs = 0.0;
        for (int x : idx) {
            RadialProfile prof = s.ambient_profile(s.vertex_of(x), nu_amb);
            Eigen::VectorXd dx = s.dist_from(s.vertex_of(x));
            double inner = 0.0;
            for (int y : idx)
                inner += q[y] * s.mu()[y] * prof.moment(dx[s.vertex_of(y)], 0.0);
            lhs += inner * inner * s.mu()[x];
        }
        A = std::max(A, lhs / mass);
    }
    TraceFKReport rep{A, trace_c1(ops, q), 0.0};
    rep.ratio = A > 0.0 ? rep.c1 / A : 0.0;
    return rep;
}

TraceDPReport traceDP_conditions(const Operators& ops, const ScalarField& q, double nu_amb) {
    require_nonneg(q);
    if (nu_amb <= 2.0)
        throw TailDivergesError("radial tails diverge: growth exponent <= 2");
    if (q.maxCoeff() == 0.0) return {0.0, 0.0, 0.0, 0.0, 0.0};
    const GraphSpace& s = ops.space();
    int nI = ops.nI();
    ScalarField Q = ops.frac_power_apply(-0.5, q);

    ScalarField Qt = ScalarField::Zero(nI);
    std::vector<Eigen::VectorXd> dists(static_cast<std::size_t>(nI));
    std::vector<RadialProfile> profs;
    profs.reserve(static_cast<std::size_t>(nI));
    for (int x = 0; x < nI; ++x) {
        profs.push_back(s.ambient_profile(s.vertex_of(x), nu_amb));
        dists[static_cast<std::size_t>(x)] = s.dist_from(s.vertex_of(x));
        double acc = 0.0;
        for (int y = 0; y < nI; ++y)
            acc += q[y] * s.mu()[y] *
                   profs.back().moment(dists[static_cast<std::size_t>(x)][s.vertex_of(y)], 0.0);
        Qt[x] = acc;
    }

    TraceDPReport rep{0.0, 0.0, 0.0, std::numeric_limits<double>::infinity(), 0.0};
    ScalarField KQ2 = ops.frac_power_apply(-0.5, Q.cwiseProduct(Q));
    for (int x = 0; x < nI; ++x) {
        if (Q[x] <= 0.0) continue;
        rep.C_ii = std::max(rep.C_ii, KQ2[x] / Q[x]);
        rep.comp_lo = std::min(rep.comp_lo, Q[x] / Qt[x]);
        rep.comp_hi = std::max(rep.comp_hi, Q[x] / Qt[x]);
        double acc = 0.0;
        for (int y = 0; y < nI; ++y)
            acc += Qt[y] * Qt[y] * s.mu()[y] *
                   profs[static_cast<std::size_t>(x)].moment(
                       dists[static_cast<std::size_t>(x)][s.vertex_of(y)], 0.0);
        rep.C_iv = std::max(rep.C_iv, acc / Qt[x]);
    }
    // condition iii is ball-restricted: the energy integral runs over B only
    for (const auto& U : candidate_sets(ops, q, TraceFamily::Balls)) {
        double mass = 0.0;
        ScalarField qU = ScalarField::Zero(nI);
        for (int i : U) {
            mass += q[i] * s.mu()[i];
            qU[i] = q[i];
        }
        if (mass <= 0.0) continue;
        ScalarField u = ops.frac_power_apply(-0.5, qU);
        double energy = 0.0;
        for (int i : U) energy += u[i] * u[i] * s.mu()[i];
        rep.C_iii = std::max(rep.C_iii, energy / mass);
    }
    return rep;
}

}  // namespace potlab
