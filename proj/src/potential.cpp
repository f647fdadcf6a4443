#include "potlab/potential.hpp"

#include <algorithm>
#include <cmath>

namespace potlab {

EquilibriumData capacity(const Operators& ops, const std::vector<int>& U) {
    const GraphSpace& s = ops.space();
    if (!s.has_boundary()) throw EmptyBoundaryError();
    if (U.empty()) throw InputError("capacity needs a nonempty set");
    int nI = ops.nI();
    std::vector<char> inU(static_cast<std::size_t>(nI), 0);
    for (int i : U) {
        if (i < 0 || i >= nI) throw InputError("capacity set must consist of interior vertices");
        inU[static_cast<std::size_t>(i)] = 1;
    }
    std::vector<int> free;
    for (int i = 0; i < nI; ++i)
        if (!inU[static_cast<std::size_t>(i)]) free.push_back(i);
    ScalarField h = ScalarField::Zero(nI);
    for (int i : U) h[i] = 1.0;
    if (!free.empty()) {
        std::vector<int> pos(static_cast<std::size_t>(nI), -1);
        for (std::size_t j = 0; j < free.size(); ++j) pos[static_cast<std::size_t>(free[j])] = static_cast<int>(j);
        const SpMat& L = ops.stiffness();
        std::vector<Eigen::Triplet<double>> trip;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(free.size()));
        for (int col = 0; col < L.outerSize(); ++col)
            for (SpMat::InnerIterator it(L, col); it; ++it) {
                int r = static_cast<int>(it.row()), c = col;
                int pr = pos[static_cast<std::size_t>(r)], pc = pos[static_cast<std::size_t>(c)];
                if (pr >= 0 && pc >= 0)
                    trip.emplace_back(pr, pc, it.value());
                else if (pr >= 0 && inU[static_cast<std::size_t>(c)])
                    rhs[pr] -= it.value();
            }
        SpMat Lff(static_cast<Eigen::Index>(free.size()), static_cast<Eigen::Index>(free.size()));
        Lff.setFromTriplets(trip.begin(), trip.end());
        Eigen::SimplicialLDLT<SpMat> solver(Lff);
        if (solver.info() != Eigen::Success)
            throw InputError("capacity system is singular (component without boundary?)");
        Eigen::VectorXd hf = solver.solve(rhs);
        for (std::size_t j = 0; j < free.size(); ++j) h[free[j]] = hf[static_cast<Eigen::Index>(j)];
    }
    EquilibriumData eq;
    eq.U = U;
    eq.h = h;
    Eigen::VectorXd Lh = ops.stiffness() * h;
    eq.cap = h.dot(Lh);
    eq.nu_U = Lh;  // mu * Laplacian h
    return eq;
}

SuperharmonicVerdict is_superharmonic(const Operators& ops, const ScalarField& f,
                                      const std::vector<double>& t_samples) {
    double tol = 1e-10 * f.cwiseAbs().maxCoeff();
    double worst = std::numeric_limits<double>::infinity();
    ScalarField lap = ops.laplacian_apply(f);
    worst = std::min(worst, lap.minCoeff());
    for (double t : t_samples) {
        ScalarField diff = f - ops.heat(t, f);
        worst = std::min(worst, diff.minCoeff());
    }
    return {worst >= -tol, worst};
}

HtauCheck htau_energy_check(const Operators& ops, const EquilibriumData& eq, double tau) {
    if (tau <= 0.5) throw InputError("energy bound needs tau > 1/2");
    ScalarField ht = eq.h.array().max(0.0).pow(tau);
    double lhs = ops.dirichlet_energy(ht);
    double rhs = tau * tau / (2.0 * tau - 1.0) * eq.cap;
    return {lhs, rhs, lhs / rhs};
}

double hardy_constant(const Operators& ops, const ScalarField& h, double delta) {
    if (delta >= 1.0) throw InputError("Hardy exponent must satisfy delta < 1");
    if ((h.array() <= 0.0).any()) throw InputError("Hardy weight must be positive on the interior");
    const GraphSpace& s = ops.space();
    ScalarField dens = ScalarField::Zero(ops.nI());
    const auto& edges = s.edges();
    for (int e = 0; e < ops.nE(); ++e) {
        const Edge& ed = edges[static_cast<std::size_t>(e)];
        int iu = s.interior_index(ed.u), iv = s.interior_index(ed.v);
        if (iu < 0 || iv < 0) continue;  // density (dh/h)^2 lives away from the ideal boundary
        double diff = h[iu] - h[iv];
        double val = ops.edge_weight()[e] * diff * diff /
                     (ed.len * ed.len * h[iu] * h[iv]);
        dens[iu] += 0.5 * val;
        dens[iv] += 0.5 * val;
    }
    // A = diag(dens * h^delta): note dens already carries the mu-free edge mass, so the
    // mass-form entries are dens * h^delta (the 1/mu of the density cancels against dmu)
    Eigen::VectorXd Adiag = dens.cwiseProduct(h.array().pow(delta).matrix());
    Eigen::VectorXd ge = lift_vertex_weight(s, h.array().pow(delta).matrix());
    SpMat Ld = ops.incidence().transpose() *
               ops.edge_weight().cwiseProduct(ge).asDiagonal() * ops.incidence();
    Eigen::SimplicialLDLT<SpMat> solver(Ld);
    if (solver.info() != Eigen::Success) throw EmptyBoundaryError();
    Rng rng(2024);
    auto apply = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        return solver.solve(Adiag.cwiseProduct(v));
    };
    return spectral_radius(apply, ops.nI(), rng, 1e-10).value;
}

double parabolicity_diagnostic(const Operators& ops, const Eigen::VectorXd& omega_edge,
                               const std::vector<int>& K, const std::vector<int>& far) {
    if (K.empty()) throw InputError("parabolicity diagnostic needs a nonempty core");
    int nI = ops.nI();
    Eigen::VectorXd aw = ops.edge_weight().cwiseProduct(omega_edge);
    SpMat Lw = ops.incidence().transpose() * aw.asDiagonal() * ops.incidence();
    std::vector<int> role(static_cast<std::size_t>(nI), 0);  // 0 free, 1 core, 2 far
    for (int i : K) role[static_cast<std::size_t>(i)] = 1;
    for (int i : far) {
        if (role[static_cast<std::size_t>(i)] == 1) throw InputError("core and far sets overlap");
        role[static_cast<std::size_t>(i)] = 2;
    }
    std::vector<int> free, pos(static_cast<std::size_t>(nI), -1);
    for (int i = 0; i < nI; ++i)
        if (role[static_cast<std::size_t>(i)] == 0) {
            pos[static_cast<std::size_t>(i)] = static_cast<int>(free.size());
            free.push_back(i);
        }
    ScalarField chi = ScalarField::Zero(nI);
    for (int i : K) chi[i] = 1.0;
    if (!free.empty()) {
        std::vector<Eigen::Triplet<double>> trip;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(free.size()));
        for (int col = 0; col < Lw.outerSize(); ++col)
            for (SpMat::InnerIterator it(Lw, col); it; ++it) {
                int r = static_cast<int>(it.row());
                int pr = pos[static_cast<std::size_t>(r)], pc = pos[static_cast<std::size_t>(col)];
                if (pr >= 0 && pc >= 0)
                    trip.emplace_back(pr, pc, it.value());
                else if (pr >= 0 && role[static_cast<std::size_t>(col)] == 1)
                    rhs[pr] -= it.value();
            }
        SpMat Lff(static_cast<Eigen::Index>(free.size()), static_cast<Eigen::Index>(free.size()));
        Lff.setFromTriplets(trip.begin(), trip.end());
        Eigen::SimplicialLDLT<SpMat> solver(Lff);
        if (solver.info() != Eigen::Success)
            throw InputError("diagnostic system is singular");
        Eigen::VectorXd cf = solver.solve(rhs);
        for (std::size_t j = 0; j < free.size(); ++j) chi[free[j]] = cf[static_cast<Eigen::Index>(j)];
    }
    return chi.dot(Lw * chi);
}

}  // namespace potlab
