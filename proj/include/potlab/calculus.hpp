#pragma once

#include "potlab/common.hpp"
#include "potlab/space.hpp"

#include <Eigen/SparseCholesky>
#include <functional>
#include <memory>

namespace potlab {

// Discrete exterior calculus and spectral operators over one GraphSpace.
// Conventions: (d phi)_e = (phi_v - phi_u)/len_e on a fixed orientation, boundary values 0;
// edge inner product <a,b> = sum a_e * alpha_e beta_e with a_e = w_e * len_e; stiffness
// L = D^T A D; Laplacian = M^{-1} L (positive, self-adjoint for the mu inner product).
class Operators {
  public:
    explicit Operators(const GraphSpace& s);

    const GraphSpace& space() const { return *s_; }
    int nI() const { return s_->interior_count(); }
    int nE() const { return s_->edge_count(); }
    const SpMat& incidence() const { return D_; }
    const Eigen::VectorXd& edge_weight() const { return a_; }
    const SpMat& stiffness() const { return L_; }

    EdgeField d(const ScalarField& phi) const { return D_ * phi; }
    ScalarField dstar(const EdgeField& beta) const {
        return (D_.transpose() * a_.cwiseProduct(beta).eval()).cwiseQuotient(s_->mu());
    }
    ScalarField laplacian_apply(const ScalarField& phi) const {
        return (L_ * phi).cwiseQuotient(s_->mu());
    }
    double mu_inner(const ScalarField& f, const ScalarField& g) const {
        return f.cwiseProduct(g).dot(s_->mu());
    }
    double edge_inner(const EdgeField& a, const EdgeField& b) const {
        return a.cwiseProduct(b).dot(a_);
    }
    double dirichlet_energy(const ScalarField& phi) const {
        EdgeField e = d(phi);
        return edge_inner(e, e);
    }

    // |theta|^2 aggregated to vertices by half-edge splitting.
    ScalarField edge_energy_density(const EdgeField& theta) const;

    // --- Green / Hodge layer (requires a nonempty boundary) ---
    ScalarField stiffness_solve(const ScalarField& rhs) const;  // L^{-1} rhs
    ScalarField green_apply(const ScalarField& f) const;        // solves Laplacian u = f
    ScalarField green_column(int i) const;                      // G(x_i, .)
    Eigen::MatrixXd green_kernel() const;
    EdgeField hodge_project(const EdgeField& beta) const;

    // --- spectral layer (dense; guarded by an interior-size limit) ---
    struct Spectral {
        Eigen::VectorXd lambda;  // nondecreasing, positive
        Eigen::MatrixXd U;       // mu-orthonormal eigenfields as columns
    };
    const Spectral& spectral() const;
    ScalarField heat(double t, const ScalarField& f) const;
    double heat_kernel(double t, int i, int j) const;
    ScalarField frac_power_apply(double s, const ScalarField& f) const;

  private:
    const GraphSpace* s_;
    SpMat D_;
    Eigen::VectorXd a_;
    SpMat L_;
    mutable std::unique_ptr<Eigen::SimplicialLDLT<SpMat>> solver_;
    mutable std::unique_ptr<Spectral> spectral_;
    void ensure_solver() const;
};

inline constexpr int kSpectralLimit = 6000;

// Power iteration for the largest |eigenvalue| of `apply` (linear map on R^dim);
// deterministic seeded start, relative tolerance, iteration cap.
NormEstimate spectral_radius(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                             Eigen::Index dim, Rng& rng, double tol = 1e-9, int max_iter = 100000);

// Operator norm of T on the weighted space with inner product diag(w):
// sqrt of lambda_max(W^{-1/2} T^T W T W^{-1/2}); applyT must be the plain transpose of apply.
NormEstimate weighted_op_norm(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                              const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& applyT,
                              const Eigen::VectorXd& w, Rng& rng, double tol = 1e-9,
                              int max_iter = 100000);

// Hodge projector norm on the edge space weighted by a positive vertex weight lifted to
// edges (geometric mean over interior endpoints).
Eigen::VectorXd lift_vertex_weight(const GraphSpace& s, const Eigen::VectorXd& omega);
double hodge_weighted_norm(const Operators& ops, const Eigen::VectorXd& omega_vertex, Rng& rng);

// Harmonic extension: L u = 0 at every interior vertex not in `pinned`, u = values on the
// pinned interior indices, u = 0 on the graph boundary (which need not be reachable).
ScalarField pinned_solve(const Operators& ops, const std::vector<int>& pinned,
                         const Eigen::VectorXd& values);

struct GaussianBoundsReport {
    double c_best;    // largest c with (c/V(x,sqrt t)) e^{-d^2/(ct)} <= P for all samples
    double C_best;    // smallest C with P <= (C/V(x,sqrt t)) e^{-d^2/(5t)}
    double c_diag;    // largest c' with c'/V(x,sqrt t) <= P(t,y,z) for sampled y,z in B(x,sqrt t)
    double t_lo, t_hi;  // scanned range (clipped at diam^2)
};
GaussianBoundsReport check_gaussian_bounds(const Operators& ops, double nu_amb,
                                           const std::vector<double>& t_grid, int pair_sample,
                                           Rng& rng);

struct GreenEstimateReport {
    double c, C;         // two-sided constants for G(x,y) vs int_d^inf r/V(x,r) dr, x != y
    double c3;           // best constant for G(x,y) >= c3 d^2/V(x,d)
    double c0;           // best constant for inf_{B(x,r)} G(x,.) >= c0 r^2/V(x,r)
    double kappa_max;    // largest certified per-center profile kappa among scanned centers
};
// Scans pairs among `centers` (interior indices); profiles use the default per-center
// R_cut (distance to the boundary shell). Requires nu_amb > 2.
GreenEstimateReport check_green_estimates(const Operators& ops, double nu_amb,
                                          const std::vector<int>& centers);

}  // namespace potlab
