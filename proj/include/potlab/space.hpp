#pragma once

#include "potlab/common.hpp"
#include "potlab/profile.hpp"

#include <optional>

namespace potlab {

struct Edge {
    int u, v;
    double w;    // conductance
    double len;  // edge length
};

// Finite weighted graph with a (possibly empty) Dirichlet boundary shell.
// A nonempty boundary is what makes the model non-parabolic.
class GraphSpace {
  public:
    GraphSpace(int n, std::vector<bool> interior, Eigen::VectorXd mu, std::vector<Edge> edges);

    int n() const { return n_; }
    int interior_count() const { return static_cast<int>(ivert_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    bool is_interior(int v) const { return interior_[static_cast<std::size_t>(v)]; }
    bool has_boundary() const { return interior_count() < n_; }
    const Eigen::VectorXd& mu() const { return mu_; }  // indexed by interior index
    const std::vector<Edge>& edges() const { return edges_; }
    int interior_index(int v) const { return imap_[static_cast<std::size_t>(v)]; }  // -1 if boundary
    int vertex_of(int i) const { return ivert_[static_cast<std::size_t>(i)]; }
    const std::vector<std::pair<int, int>>& neighbors(int v) const {  // (vertex, edge id)
        return adj_[static_cast<std::size_t>(v)];
    }

    // Geodesic distance from v to every vertex (+inf where unreachable).
    // BFS for unit edge lengths, Dijkstra otherwise.
    Eigen::VectorXd dist_from(int v) const;

    // Distance from interior vertex (by interior index) to the nearest boundary vertex;
    // +inf when there is no boundary.
    Eigen::VectorXd boundary_distance() const;

    // Sorted distinct positive pairwise distances (the finite set of useful radii).
    std::vector<double> all_radii() const;

    // Closed-ball membership as interior indices.
    std::vector<int> ball_interior(int center_vertex, double radius) const;

    // Empirical mu-mass profile around an interior vertex with the declared growth tail.
    // Default R_cut: the distance to the boundary shell (largest unclipped radius);
    // with no boundary, the largest pairwise distance.
    RadialProfile ambient_profile(int center_vertex, double nu_amb,
                                  std::optional<double> R_cut = std::nullopt) const;

    std::string to_json() const;
    static GraphSpace from_json(const std::string& text);

  private:
    int n_;
    std::vector<bool> interior_;
    Eigen::VectorXd mu_;
    std::vector<Edge> edges_;
    std::vector<int> imap_, ivert_;
    std::vector<std::vector<std::pair<int, int>>> adj_;
    bool unit_lengths_;
};

struct Ball {
    int center;
    double radius;
    std::vector<int> members;  // vertex ids with d(center, y) <= radius
};

struct DoublingProfile {
    double kappa = 1.0;
    double nu = 1.0;
    double gamma = 2.0;  // kappa * 2^nu
    bool nu_fitted = false;
    std::optional<double> lambda_poincare;
    std::optional<double> fk_b;
};

GraphSpace build_grid_space(int dim, int side, bool dirichlet_shell);

// Minimal kappa over all centers and all pairs r <= R from the radii grid, for the given
// nu (or least-squares fitted when absent); gamma = kappa * 2^nu.
DoublingProfile estimate_doubling(const GraphSpace& s, const std::vector<double>& radii,
                                  std::optional<double> nu = std::nullopt);

struct PoincareResult {
    double lambda;  // +inf when some scanned ball subgraph is disconnected
    int worst_center = -1;
    double worst_radius = 0.0;
};

// Neumann-type ball Poincare constant: per ball, the largest eigenvalue of the mean-zero
// mass form against the Dirichlet form of the ball-induced subgraph, divided by r^2;
// maximum over all scanned balls.
PoincareResult estimate_poincare(const GraphSpace& s, const std::vector<double>& radii);

// Smallest eigenvalue of the Laplacian restricted to fields vanishing outside U
// (U given as interior indices).
double dirichlet_lambda1(const GraphSpace& s, const std::vector<int>& U);

// Largest b certified for the relative Faber-Krahn inequality over seeded random
// connected subsets of the given balls.
double check_faber_krahn(const GraphSpace& s, const DoublingProfile& profile,
                         const std::vector<Ball>& balls, int subsets_per_ball, Rng& rng);

Ball make_ball(const GraphSpace& s, int center_vertex, double radius);

// Boundary-separated ball family: balls B(x, r) with separation * r <= d(x, boundary),
// centers strided to at most max_centers, at most radii_per_center radii each (all radii
// when the space has no boundary). One distance sweep per center.
std::vector<Ball> separated_ball_family(const GraphSpace& s, double separation, int max_centers,
                                        int radii_per_center = 6);

}  // namespace potlab
