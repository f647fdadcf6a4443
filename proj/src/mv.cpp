#include "potlab/mv.hpp"

#include "potlab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace potlab {

namespace {

// Density and right-hand side of the weak equation for either representation:
// rhs_i = <V, e_i>, density f = rhs / mu.
ScalarField potential_rhs(const Operators& ops, const Potential& V) {
    if (V.kind == Potential::Kind::Function) {
        if (V.f.size() != ops.nI()) throw InputError("potential density size mismatch");
        return V.f.cwiseProduct(ops.space().mu());
    }
    if (V.theta0.size() != ops.nE()) throw InputError("potential edge field size mismatch");
    return ops.incidence().transpose() * ops.edge_weight().cwiseProduct(V.theta0).eval();
}

}  // namespace

double form_constant_A(const Operators& ops, const Potential& V) {
    if (!ops.space().has_boundary()) throw EmptyBoundaryError();
    ScalarField rhs = potential_rhs(ops, V);
    if (rhs.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    Rng rng(4409);
    auto apply = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        return ops.stiffness_solve(rhs.cwiseProduct(v));
    };
    return spectral_radius(apply, ops.nI(), rng, 1e-13, 200000).value;
}

EdgeField representing_form(const Operators& ops, const Potential& V) {
    if (!ops.space().has_boundary()) throw EmptyBoundaryError();
    return ops.incidence() * ops.stiffness_solve(potential_rhs(ops, V));
}

double multiplier_constant_B(const Operators& ops, const EdgeField& theta) {
    ScalarField dens = ops.edge_energy_density(theta);
    if (dens.maxCoeff() == 0.0) return 0.0;
    const Eigen::VectorXd& mu = ops.space().mu();
    Rng rng(4411);
    auto apply = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        return ops.stiffness_solve(dens.cwiseProduct(mu).cwiseProduct(v));
    };
    return spectral_radius(apply, ops.nI(), rng, 1e-13, 200000).value;
}

MVReport mv_verify(const Operators& ops, const Potential& V, const std::vector<Ball>& balls) {
    const GraphSpace& s = ops.space();
    MVReport rep;
    rep.A = form_constant_A(ops, V);
    rep.theta = representing_form(ops, V);
    rep.B = multiplier_constant_B(ops, rep.theta);
    rep.ratio_forward = rep.B > 0.0 ? rep.A / (2.0 * std::sqrt(rep.B)) : 0.0;
    rep.ratio_reverse = rep.A > 0.0 ? rep.B / (rep.A * rep.A) : 0.0;

    if (rep.A > 0.0) {
        ScalarField dens_mu = ops.edge_energy_density(rep.theta).cwiseProduct(s.mu());
        for (const Ball& b : balls) {
            std::vector<int> U;
            for (int v : b.members)
                if (s.interior_index(v) >= 0) U.push_back(s.interior_index(v));
            if (U.empty()) continue;
            double mass = 0.0;
            for (int i : U) mass += dens_mu[i];
            double cap = capacity(ops, U).cap;
            if (cap > 0.0)
                rep.capacitary_Cprime =
                    std::max(rep.capacitary_Cprime, mass / (cap * rep.A * rep.A));
        }
    }
    return rep;
}

double decay_estimate_probe(const Operators& ops, const EdgeField& beta, int o_vertex, double R) {
    const GraphSpace& s = ops.space();
    if (s.interior_index(o_vertex) < 0) throw InputError("probe pole must be interior");
    if (beta.cwiseAbs().maxCoeff() == 0.0)
        throw InputError("probe is vacuous: the edge field vanishes");
    Eigen::VectorXd d_o = s.dist_from(o_vertex);
    const auto& edges = s.edges();
    for (int e = 0; e < ops.nE(); ++e)
        if (beta[e] != 0.0) {
            const Edge& ed = edges[static_cast<std::size_t>(e)];
            if (d_o[ed.u] > R || d_o[ed.v] > R)
                throw InputError("probe support exceeds the declared ball");
        }
    ScalarField phi = ops.stiffness_solve(
        ops.incidence().transpose() * ops.edge_weight().cwiseProduct(beta).eval());
    ScalarField G = ops.green_column(s.interior_index(o_vertex));
    // least-squares slope of log|phi| against log G over the far region
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (int i = 0; i < ops.nI(); ++i) {
        if (d_o[s.vertex_of(i)] <= 6.0 * R) continue;
        if (std::abs(phi[i]) < 1e-300 || G[i] <= 0.0) continue;
        double x = std::log(G[i]), y = std::log(std::abs(phi[i]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 3) throw InputError("probe support too large: no usable far region");
    double denom = m * sxx - sx * sx;
    if (denom == 0.0) throw InputError("degenerate far-region fit");
    return (m * sxy - sx * sy) / denom;
}

}  // namespace potlab
