#include "potlab/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace potlab {

Operators::Operators(const GraphSpace& s) : s_(&s) {
    int E = s.edge_count(), nI = s.interior_count();
    std::vector<Eigen::Triplet<double>> trip;
    a_.resize(E);
    const auto& edges = s.edges();
    for (int e = 0; e < E; ++e) {
        const Edge& ed = edges[static_cast<std::size_t>(e)];
        a_[e] = ed.w * ed.len;
        int iu = s.interior_index(ed.u), iv = s.interior_index(ed.v);
        if (iu >= 0) trip.emplace_back(e, iu, -1.0 / ed.len);
        if (iv >= 0) trip.emplace_back(e, iv, 1.0 / ed.len);
    }
    D_.resize(E, nI);
    D_.setFromTriplets(trip.begin(), trip.end());
    L_ = D_.transpose() * a_.asDiagonal() * D_;
}

ScalarField Operators::edge_energy_density(const EdgeField& theta) const {
    ScalarField out = ScalarField::Zero(nI());
    const auto& edges = s_->edges();
    for (int e = 0; e < nE(); ++e) {
        double half = 0.5 * a_[e] * theta[e] * theta[e];
        int iu = s_->interior_index(edges[static_cast<std::size_t>(e)].u);
        int iv = s_->interior_index(edges[static_cast<std::size_t>(e)].v);
        if (iu >= 0) out[iu] += half;
        if (iv >= 0) out[iv] += half;
    }
    return out.cwiseQuotient(s_->mu());
}

void Operators::ensure_solver() const {
    if (solver_) return;
    if (!s_->has_boundary()) throw EmptyBoundaryError();
    solver_ = std::make_unique<Eigen::SimplicialLDLT<SpMat>>(L_);
    if (solver_->info() != Eigen::Success) throw std::runtime_error("stiffness factorization failed");
}

ScalarField Operators::stiffness_solve(const ScalarField& rhs) const {
    ensure_solver();
    return solver_->solve(rhs);
}

ScalarField Operators::green_apply(const ScalarField& f) const {
    return stiffness_solve(f.cwiseProduct(s_->mu()));
}

ScalarField Operators::green_column(int i) const {
    ScalarField e = ScalarField::Zero(nI());
    e[i] = 1.0;
    return stiffness_solve(e);
}

Eigen::MatrixXd Operators::green_kernel() const {
    ensure_solver();
    Eigen::MatrixXd G(nI(), nI());
    for (int i = 0; i < nI(); ++i) G.col(i) = green_column(i);
    return G;
}

EdgeField Operators::hodge_project(const EdgeField& beta) const {
    return D_ * stiffness_solve(D_.transpose() * a_.cwiseProduct(beta).eval());
}

const Operators::Spectral& Operators::spectral() const {
    if (!spectral_) {
        if (!s_->has_boundary()) throw EmptyBoundaryError();
        if (nI() > kSpectralLimit)
            throw InputError("spectral decomposition limited to " +
                             std::to_string(kSpectralLimit) + " interior vertices");
        Eigen::VectorXd sq = s_->mu().cwiseSqrt();
        Eigen::MatrixXd S = sq.cwiseInverse().asDiagonal() * Eigen::MatrixXd(L_) *
                            sq.cwiseInverse().asDiagonal();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
        auto sp = std::make_unique<Spectral>();
        sp->lambda = es.eigenvalues();
        sp->U = sq.cwiseInverse().asDiagonal() * es.eigenvectors();
        spectral_ = std::move(sp);
    }
    return *spectral_;
}

ScalarField Operators::heat(double t, const ScalarField& f) const {
    if (t < 0.0) throw InputError("heat semigroup needs t >= 0");
    const Spectral& sp = spectral();
    Eigen::VectorXd coef = sp.U.transpose() * f.cwiseProduct(s_->mu());
    return sp.U * (coef.array() * (-t * sp.lambda.array()).exp()).matrix();
}

double Operators::heat_kernel(double t, int i, int j) const {
    if (t < 0.0) throw InputError("heat kernel needs t >= 0");
    const Spectral& sp = spectral();
    return ((-t * sp.lambda.array()).exp() * sp.U.row(i).transpose().array() *
            sp.U.row(j).transpose().array())
        .sum();
}

ScalarField Operators::frac_power_apply(double s, const ScalarField& f) const {
    if (s < -1.0 || s > 1.0) throw InputError("fractional power restricted to s in [-1,1]");
    const Spectral& sp = spectral();
    Eigen::VectorXd coef = sp.U.transpose() * f.cwiseProduct(s_->mu());
    return sp.U * (coef.array() * sp.lambda.array().pow(s)).matrix();
}

NormEstimate spectral_radius(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                             Eigen::Index dim, Rng& rng, double tol, int max_iter) {
    Eigen::VectorXd v = rng.normal_vector(dim);
    v.normalize();
    NormEstimate est;
    double lam = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        Eigen::VectorXd u = apply(v);
        double nv = u.norm();
        est.iterations = it;
        if (nv == 0.0) {
            est.value = 0.0;
            return est;
        }
        v = u / nv;
        if (std::abs(nv - lam) < tol * std::max(1.0, nv)) {
            est.value = nv;
            return est;
        }
        lam = nv;
    }
    est.value = lam;
    est.converged = false;
    return est;
}

NormEstimate weighted_op_norm(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                              const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& applyT,
                              const Eigen::VectorXd& w, Rng& rng, double tol, int max_iter) {
    if ((w.array() <= 0.0).any()) throw InputError("weight must be strictly positive");
    Eigen::VectorXd sq = w.cwiseSqrt();
    auto sym = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        Eigen::VectorXd x = sq.cwiseProduct(apply(v.cwiseQuotient(sq)));
        return applyT(sq.cwiseProduct(x)).cwiseQuotient(sq);
    };
    NormEstimate est = spectral_radius(sym, w.size(), rng, tol, max_iter);
    est.value = std::sqrt(std::max(0.0, est.value));
    return est;
}

Eigen::VectorXd lift_vertex_weight(const GraphSpace& s, const Eigen::VectorXd& omega) {
    Eigen::VectorXd ge = Eigen::VectorXd::Ones(s.edge_count());
    const auto& edges = s.edges();
    for (int e = 0; e < s.edge_count(); ++e) {
        int iu = s.interior_index(edges[static_cast<std::size_t>(e)].u);
        int iv = s.interior_index(edges[static_cast<std::size_t>(e)].v);
        // geometric mean over the interior endpoints (boundary carries no weight)
        if (iu >= 0 && iv >= 0)
            ge[e] = std::sqrt(omega[iu] * omega[iv]);
        else if (iu >= 0)
            ge[e] = omega[iu];
        else if (iv >= 0)
            ge[e] = omega[iv];
    }
    return ge;
}

double hodge_weighted_norm(const Operators& ops, const Eigen::VectorXd& omega_vertex, Rng& rng) {
    Eigen::VectorXd w = ops.edge_weight().cwiseProduct(lift_vertex_weight(ops.space(), omega_vertex));
    auto apply = [&](const Eigen::VectorXd& b) { return ops.hodge_project(b); };
    // plain transpose of Pi = D L^{-1} D^T A is A Pi A^{-1}
    auto applyT = [&](const Eigen::VectorXd& b) -> Eigen::VectorXd {
        return ops.edge_weight().cwiseProduct(
            ops.hodge_project(b.cwiseQuotient(ops.edge_weight())));
    };
    return weighted_op_norm(apply, applyT, w, rng).value;
}

ScalarField pinned_solve(const Operators& ops, const std::vector<int>& pinned,
                         const Eigen::VectorXd& values) {
    int nI = ops.nI();
    if (static_cast<Eigen::Index>(pinned.size()) != values.size())
        throw InputError("pinned index/value size mismatch");
    std::vector<int> pos(static_cast<std::size_t>(nI), -2);  // -2 free
    for (std::size_t k = 0; k < pinned.size(); ++k) {
        int i = pinned[k];
        if (i < 0 || i >= nI) throw InputError("pinned index out of range");
        pos[static_cast<std::size_t>(i)] = -1;
    }
    std::vector<int> free;
    for (int i = 0; i < nI; ++i)
        if (pos[static_cast<std::size_t>(i)] == -2) {
            pos[static_cast<std::size_t>(i)] = static_cast<int>(free.size());
            free.push_back(i);
        }
    ScalarField u = ScalarField::Zero(nI);
    for (std::size_t k = 0; k < pinned.size(); ++k) u[pinned[k]] = values[static_cast<Eigen::Index>(k)];
    if (!free.empty()) {
        const SpMat& L = ops.stiffness();
        std::vector<Eigen::Triplet<double>> trip;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(free.size()));
        for (int col = 0; col < L.outerSize(); ++col)
            for (SpMat::InnerIterator it(L, col); it; ++it) {
                int pr = pos[static_cast<std::size_t>(it.row())];
                int pc = pos[static_cast<std::size_t>(col)];
                if (pr < 0) continue;
                if (pc >= 0)
                    trip.emplace_back(pr, pc, it.value());
                else
                    rhs[pr] -= it.value() * u[col];
            }
        SpMat Lff(static_cast<Eigen::Index>(free.size()), static_cast<Eigen::Index>(free.size()));
        Lff.setFromTriplets(trip.begin(), trip.end());
        Eigen::SimplicialLDLT<SpMat> solver(Lff);
        if (solver.info() != Eigen::Success) throw InputError("pinned system is singular");
        Eigen::VectorXd uf = solver.solve(rhs);
        for (std::size_t j = 0; j < free.size(); ++j) u[free[j]] = uf[static_cast<Eigen::Index>(j)];
    }
    return u;
}

GaussianBoundsReport check_gaussian_bounds(const Operators& ops, double nu_amb,
                                           const std::vector<double>& t_grid, int pair_sample,
                                           Rng& rng) {
    const GraphSpace& s = ops.space();
    // diameter via double sweep (exact enough as a clip scale)
    Eigen::VectorXd d0 = s.dist_from(s.vertex_of(0));
    int far = 0;
    for (int v = 0; v < s.n(); ++v)
        if (d0[v] > d0[far]) far = v;
    double diam = s.dist_from(far).maxCoeff();
    double t_hi = diam * diam;

    struct Sample {
        double P, V, d, t;
    };
    std::vector<Sample> samples;
    std::vector<int> xs;
    for (int k = 0; k < pair_sample; ++k) xs.push_back(static_cast<int>(rng.next_below(static_cast<std::uint64_t>(s.interior_count()))));
    double c_diag = std::numeric_limits<double>::infinity();
    double t_lo = t_hi;
    for (int x : xs) {
        int y = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(s.interior_count())));
        RadialProfile prof = s.ambient_profile(s.vertex_of(x), nu_amb);
        Eigen::VectorXd dx = s.dist_from(s.vertex_of(x));
        double d = dx[s.vertex_of(y)];
        for (double t : t_grid) {
            if (t <= 0.0 || t > t_hi) continue;
            t_lo = std::min(t_lo, t);
            double P = ops.heat_kernel(t, x, y);
            double V = prof.value(std::sqrt(t));
            samples.push_back({P, V, d, t});
            if (d <= std::sqrt(t)) c_diag = std::min(c_diag, P * V);
        }
    }
    if (samples.empty()) throw InputError("no admissible (pair, t) samples for the bound scan");
    double C_best = 0.0;
    for (const Sample& sm : samples)
        C_best = std::max(C_best, sm.P * sm.V * std::exp(sm.d * sm.d / (5.0 * sm.t)));
    // largest c for the lower bound: the constraint is monotone in c, so bisect
    auto lower_ok = [&](double c) {
        for (const Sample& sm : samples)
            if (c / sm.V * std::exp(-sm.d * sm.d / (c * sm.t)) > sm.P) return false;
        return true;
    };
    double lo = 1e-12, hi = 1.0;
    while (lower_ok(hi) && hi < 1e12) hi *= 2.0;
    if (!lower_ok(lo)) lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (lower_ok(mid) ? lo : hi) = mid;
    }
    return {lo, C_best, c_diag, t_lo, t_hi};
}

GreenEstimateReport check_green_estimates(const Operators& ops, double nu_amb,
                                          const std::vector<int>& centers) {
    if (nu_amb <= 2.0)
        throw TailDivergesError("Green tail integral diverges: growth exponent <= 2");
    const GraphSpace& s = ops.space();
    std::set<int> targets(centers.begin(), centers.end());
    GreenEstimateReport rep{std::numeric_limits<double>::infinity(), 0.0,
                            std::numeric_limits<double>::infinity(),
                            std::numeric_limits<double>::infinity(), 1.0};
    for (int x : centers) {
        ScalarField G = ops.green_column(x);
        Eigen::VectorXd dx = s.dist_from(s.vertex_of(x));
        RadialProfile prof = s.ambient_profile(s.vertex_of(x), nu_amb);
        rep.kappa_max = std::max(rep.kappa_max, prof.kappa());
        for (int y : targets) {
            if (y == x) continue;
            double d = dx[s.vertex_of(y)];
            double I = prof.moment(d, 1.0);
            double ratio = G[y] / I;
            rep.c = std::min(rep.c, ratio);
            rep.C = std::max(rep.C, ratio);
            rep.c3 = std::min(rep.c3, G[y] * prof.value(d) / (d * d));
        }
        // inf over closed balls at the profile's own radii levels
        for (double r : prof.r) {
            if (r <= 0.0) continue;
            double inf = std::numeric_limits<double>::infinity();
            for (int j = 0; j < s.interior_count(); ++j)
                if (dx[s.vertex_of(j)] <= r) inf = std::min(inf, G[j]);
            rep.c0 = std::min(rep.c0, inf * prof.value(r) / (r * r));
        }
    }
    return rep;
}

}  // namespace potlab
