#include "potlab/space.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <nlohmann/json.hpp>
#include <queue>
#include <set>

namespace potlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

GraphSpace::GraphSpace(int n, std::vector<bool> interior, Eigen::VectorXd mu,
                       std::vector<Edge> edges)
    : n_(n), interior_(std::move(interior)), mu_(std::move(mu)), edges_(std::move(edges)) {
    if (n_ <= 0) throw InputError("space needs at least one vertex");
    if (static_cast<int>(interior_.size()) != n_) throw InputError("interior mask size mismatch");
    imap_.assign(static_cast<std::size_t>(n_), -1);
    for (int v = 0; v < n_; ++v)
        if (interior_[static_cast<std::size_t>(v)]) {
            imap_[static_cast<std::size_t>(v)] = static_cast<int>(ivert_.size());
            ivert_.push_back(v);
        }
    if (mu_.size() != static_cast<Eigen::Index>(ivert_.size()))
        throw InputError("mu must have one entry per interior vertex");
    if ((mu_.array() <= 0.0).any()) throw InputError("vertex measure must be strictly positive");
    adj_.assign(static_cast<std::size_t>(n_), {});
    unit_lengths_ = true;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const Edge& ed = edges_[e];
        if (ed.u < 0 || ed.u >= n_ || ed.v < 0 || ed.v >= n_ || ed.u == ed.v)
            throw InputError("bad edge endpoints");
        if (ed.w <= 0.0 || ed.len <= 0.0) throw InputError("conductance and length must be positive");
        if (ed.len != 1.0) unit_lengths_ = false;
        adj_[static_cast<std::size_t>(ed.u)].emplace_back(ed.v, static_cast<int>(e));
        adj_[static_cast<std::size_t>(ed.v)].emplace_back(ed.u, static_cast<int>(e));
    }
    // connectivity of the full graph (interior together with its boundary)
    std::vector<char> seen(static_cast<std::size_t>(n_), 0);
    std::deque<int> q{0};
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
        int x = q.front();
        q.pop_front();
        for (auto [y, e] : adj_[static_cast<std::size_t>(x)])
            if (!seen[static_cast<std::size_t>(y)]) {
                seen[static_cast<std::size_t>(y)] = 1;
                ++count;
                q.push_back(y);
            }
    }
    if (count != n_) throw InputError("space must be connected");
}

Eigen::VectorXd GraphSpace::dist_from(int v) const {
    Eigen::VectorXd d = Eigen::VectorXd::Constant(n_, kInf);
    if (unit_lengths_) {
        std::deque<int> q{v};
        d[v] = 0.0;
        while (!q.empty()) {
            int x = q.front();
            q.pop_front();
            for (auto [y, e] : adj_[static_cast<std::size_t>(x)])
                if (d[y] == kInf) {
                    d[y] = d[x] + 1.0;
                    q.push_back(y);
                }
        }
    } else {
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        d[v] = 0.0;
        pq.emplace(0.0, v);
        while (!pq.empty()) {
            auto [dist, x] = pq.top();
            pq.pop();
            if (dist > d[x]) continue;
            for (auto [y, e] : adj_[static_cast<std::size_t>(x)]) {
                double nd = dist + edges_[static_cast<std::size_t>(e)].len;
                if (nd < d[y]) {
                    d[y] = nd;
                    pq.emplace(nd, y);
                }
            }
        }
    }
    return d;
}

Eigen::VectorXd GraphSpace::boundary_distance() const {
    Eigen::VectorXd d = Eigen::VectorXd::Constant(n_, kInf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (int v = 0; v < n_; ++v)
        if (!interior_[static_cast<std::size_t>(v)]) {
            d[v] = 0.0;
            pq.emplace(0.0, v);
        }
    while (!pq.empty()) {
        auto [dist, x] = pq.top();
        pq.pop();
        if (dist > d[x]) continue;
        for (auto [y, e] : adj_[static_cast<std::size_t>(x)]) {
            double nd = dist + edges_[static_cast<std::size_t>(e)].len;
            if (nd < d[y]) {
                d[y] = nd;
                pq.emplace(nd, y);
            }
        }
    }
    Eigen::VectorXd out(interior_count());
    for (int i = 0; i < interior_count(); ++i) out[i] = d[ivert_[static_cast<std::size_t>(i)]];
    return out;
}

std::vector<double> GraphSpace::all_radii() const {
    std::set<double> radii;
    for (int v = 0; v < n_; ++v) {
        Eigen::VectorXd d = dist_from(v);
        for (int y = 0; y < n_; ++y)
            if (d[y] > 0.0 && d[y] < kInf) radii.insert(d[y]);
    }
    return {radii.begin(), radii.end()};
}

std::vector<int> GraphSpace::ball_interior(int center_vertex, double radius) const {
    Eigen::VectorXd d = dist_from(center_vertex);
    std::vector<int> members;
    for (int i = 0; i < interior_count(); ++i)
        if (d[ivert_[static_cast<std::size_t>(i)]] <= radius) members.push_back(i);
    return members;
}

Ball make_ball(const GraphSpace& s, int center_vertex, double radius) {
    Eigen::VectorXd d = s.dist_from(center_vertex);
    Ball b{center_vertex, radius, {}};
    for (int y = 0; y < s.n(); ++y)
        if (d[y] <= radius) b.members.push_back(y);
    return b;
}

RadialProfile GraphSpace::ambient_profile(int center_vertex, double nu_amb,
                                          std::optional<double> R_cut) const {
    if (!is_interior(center_vertex)) throw InputError("profile center must be interior");
    Eigen::VectorXd d = dist_from(center_vertex);
    Eigen::VectorXd dists(interior_count()), masses(interior_count());
    for (int i = 0; i < interior_count(); ++i) {
        dists[i] = d[ivert_[static_cast<std::size_t>(i)]];
        masses[i] = mu_[i];
    }
    double rc;
    if (R_cut) {
        rc = *R_cut;
    } else if (has_boundary()) {
        rc = kInf;
        for (int v = 0; v < n_; ++v)
            if (!interior_[static_cast<std::size_t>(v)]) rc = std::min(rc, d[v]);
    } else {
        rc = dists.maxCoeff();
    }
    return profile_from_distances(dists, masses, rc, nu_amb);
}

GraphSpace build_grid_space(int dim, int side, bool dirichlet_shell) {
    if (dim < 1 || dim > 3) throw InputError("grid dimension must be 1, 2 or 3");
    if (side < 3) throw InputError("grid side must be at least 3");
    int n = 1;
    for (int k = 0; k < dim; ++k) n *= side;
    auto coord = [&](int v, int k) {
        for (int j = 0; j < k; ++j) v /= side;
        return v % side;
    };
    std::vector<bool> interior(static_cast<std::size_t>(n), true);
    if (dirichlet_shell)
        for (int v = 0; v < n; ++v)
            for (int k = 0; k < dim; ++k) {
                int c = coord(v, k);
                if (c == 0 || c == side - 1) interior[static_cast<std::size_t>(v)] = false;
            }
    std::vector<Edge> edges;
    int stride = 1;
    for (int k = 0; k < dim; ++k) {
        for (int v = 0; v < n; ++v)
            if (coord(v, k) + 1 < side) edges.push_back({v, v + stride, 1.0, 1.0});
        stride *= side;
    }
    int nI = 0;
    for (int v = 0; v < n; ++v) nI += interior[static_cast<std::size_t>(v)];
    return GraphSpace(n, std::move(interior), Eigen::VectorXd::Ones(nI), std::move(edges));
}

namespace {

// Stiffness and mass matrices of the subgraph induced by `verts` (interior indices),
// Neumann style: only edges with both endpoints inside.
void induced_forms(const GraphSpace& s, const std::vector<int>& verts, SpMat& L,
                   Eigen::VectorXd& m) {
    int k = static_cast<int>(verts.size());
    std::vector<int> local(static_cast<std::size_t>(s.interior_count()), -1);
    for (int j = 0; j < k; ++j) local[static_cast<std::size_t>(verts[static_cast<std::size_t>(j)])] = j;
    std::vector<Eigen::Triplet<double>> trip;
    for (const Edge& e : s.edges()) {
        int iu = s.interior_index(e.u), iv = s.interior_index(e.v);
        if (iu < 0 || iv < 0) continue;
        int lu = local[static_cast<std::size_t>(iu)], lv = local[static_cast<std::size_t>(iv)];
        if (lu < 0 || lv < 0) continue;
        double c = e.w / e.len;
        trip.emplace_back(lu, lu, c);
        trip.emplace_back(lv, lv, c);
        trip.emplace_back(lu, lv, -c);
        trip.emplace_back(lv, lu, -c);
    }
    L.resize(k, k);
    L.setFromTriplets(trip.begin(), trip.end());
    m.resize(k);
    for (int j = 0; j < k; ++j) m[j] = s.mu()[verts[static_cast<std::size_t>(j)]];
}

bool induced_connected(const GraphSpace& s, const std::vector<int>& verts) {
    if (verts.empty()) return true;
    std::vector<int> local(static_cast<std::size_t>(s.interior_count()), -1);
    for (std::size_t j = 0; j < verts.size(); ++j) local[static_cast<std::size_t>(verts[j])] = static_cast<int>(j);
    std::vector<char> seen(verts.size(), 0);
    std::deque<int> q{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!q.empty()) {
        int lj = q.front();
        q.pop_front();
        int v = s.vertex_of(verts[static_cast<std::size_t>(lj)]);
        for (auto [y, e] : s.neighbors(v)) {
            int iy = s.interior_index(y);
            if (iy < 0) continue;
            int ly = local[static_cast<std::size_t>(iy)];
            if (ly >= 0 && !seen[static_cast<std::size_t>(ly)]) {
                seen[static_cast<std::size_t>(ly)] = 1;
                ++count;
                q.push_back(ly);
            }
        }
    }
    return count == verts.size();
}

// Largest eigenvalue of the mean-zero mass form against the Dirichlet form on the induced
// subgraph; 0 for a single vertex, +inf when disconnected.
double ball_mass_vs_energy(const GraphSpace& s, const std::vector<int>& verts) {
    int k = static_cast<int>(verts.size());
    if (k <= 1) return 0.0;
    if (!induced_connected(s, verts)) return kInf;
    SpMat L;
    Eigen::VectorXd m;
    induced_forms(s, verts, L, m);
    double total = m.sum();
    if (k <= 400) {
        Eigen::MatrixXd Ld = Eigen::MatrixXd(L);
        // shift the constant kernel above every genuine eigenvalue: the generalized
        // eigenvalues are bounded by 2 max_i L_ii / m_i (Gershgorin), so with this scale
        // the smallest remaining eigenvalue is lambda_2 of the mean-zero problem
        double shift = 1.0;
        for (int j = 0; j < k; ++j) shift = std::max(shift, 2.0 * Ld(j, j) / m[j] + 1.0);
        Ld += shift * (m * m.transpose()) / total;
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Ld, Eigen::MatrixXd(m.asDiagonal()));
        return 1.0 / es.eigenvalues()[0];  // 1 / lambda_2(Neumann)
    }
    // large ball: power iteration on P L^+ M P (P = mu-mean-zero projector), pinning one
    // vertex to solve inside the image of L
    SpMat Lr = L.block(1, 1, k - 1, k - 1);
    Eigen::SimplicialLDLT<SpMat> solver(Lr);
    auto project = [&](Eigen::VectorXd& x) { x.array() -= m.dot(x) / total; };
    Rng rng(12345);
    Eigen::VectorXd v = rng.normal_vector(k);
    project(v);
    v.normalize();
    double lam = 0.0;
    for (int it = 0; it < 100000; ++it) {
        Eigen::VectorXd b = m.cwiseProduct(v);
        // pin vertex 0 and solve the reduced system; b is orthogonal to constants (v is
        // mu-mean-zero), so this is L^+ b up to a constant, removed by the projection
        Eigen::VectorXd y(k);
        y[0] = 0.0;
        y.tail(k - 1) = solver.solve(Eigen::VectorXd(b.tail(k - 1)));
        project(y);
        double nv = y.norm();
        if (nv == 0.0) return 0.0;
        y /= nv;
        if (std::abs(nv - lam) < 1e-10 * std::max(1.0, nv)) return nv;
        lam = nv;
        v = y;
    }
    return lam;
}

}  // namespace

DoublingProfile estimate_doubling(const GraphSpace& s, const std::vector<double>& radii,
                                  std::optional<double> nu) {
    if (radii.empty()) throw InputError("radii grid must be nonempty");
    DoublingProfile p;
    // collect ball masses per interior center
    std::vector<std::vector<double>> vols(static_cast<std::size_t>(s.interior_count()));
    for (int i = 0; i < s.interior_count(); ++i) {
        Eigen::VectorXd d = s.dist_from(s.vertex_of(i));
        for (double r : radii) {
            double v = 0.0;
            for (int j = 0; j < s.interior_count(); ++j)
                if (d[s.vertex_of(j)] <= r) v += s.mu()[j];
            vols[static_cast<std::size_t>(i)].push_back(v);
        }
    }
    if (nu) {
        p.nu = *nu;
    } else {
        // least squares of log V against log r; balls clipped by the boundary shell would
        // bias the growth exponent downwards, so only unclipped balls enter the fit
        // (falling back to all balls when every scanned ball is clipped)
        Eigen::VectorXd bdist;
        if (s.has_boundary()) bdist = s.boundary_distance();
        for (int pass = 0; pass < 2; ++pass) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            int cnt = 0;
            for (int i = 0; i < s.interior_count(); ++i)
                for (std::size_t k = 0; k < radii.size(); ++k) {
                    if (pass == 0 && bdist.size() > 0 && radii[k] > bdist[i]) continue;
                    double v = vols[static_cast<std::size_t>(i)][k];
                    if (v <= 0.0 || radii[k] <= 0.0) continue;
                    double x = std::log(radii[k]), y = std::log(v);
                    sx += x;
                    sy += y;
                    sxx += x * x;
                    sxy += x * y;
                    ++cnt;
                }
            double denom = cnt * sxx - sx * sx;
            if (denom > 0.0) {
                p.nu = (cnt * sxy - sx * sy) / denom;
                break;
            }
            p.nu = 1.0;
        }
        p.nu_fitted = true;
    }
    double kappa = 1.0;
    for (const auto& row : vols)
        for (std::size_t a = 0; a < radii.size(); ++a)
            for (std::size_t b = a; b < radii.size(); ++b)
                if (row[a] > 0.0)
                    kappa = std::max(kappa,
                                     row[b] / (std::pow(radii[b] / radii[a], p.nu) * row[a]));
    p.kappa = kappa;
    p.gamma = kappa * std::pow(2.0, p.nu);
    return p;
}

PoincareResult estimate_poincare(const GraphSpace& s, const std::vector<double>& radii) {
    PoincareResult res{0.0};
    for (int i = 0; i < s.interior_count(); ++i) {
        int v = s.vertex_of(i);
        for (double r : radii) {
            std::vector<int> verts = s.ball_interior(v, r);
            double raw = ball_mass_vs_energy(s, verts);
            double lam = raw == kInf ? kInf : raw / (r * r);
            if (lam > res.lambda) {
                res.lambda = lam;
                res.worst_center = v;
                res.worst_radius = r;
            }
        }
    }
    return res;
}

double dirichlet_lambda1(const GraphSpace& s, const std::vector<int>& U) {
    if (U.empty()) throw InputError("dirichlet_lambda1 needs a nonempty set");
    int k = static_cast<int>(U.size());
    std::vector<int> local(static_cast<std::size_t>(s.interior_count()), -1);
    for (int j = 0; j < k; ++j) local[static_cast<std::size_t>(U[static_cast<std::size_t>(j)])] = j;
    std::vector<Eigen::Triplet<double>> trip;
    for (const Edge& e : s.edges()) {
        int iu = s.interior_index(e.u), iv = s.interior_index(e.v);
        double c = e.w / e.len;
        int lu = iu >= 0 ? local[static_cast<std::size_t>(iu)] : -1;
        int lv = iv >= 0 ? local[static_cast<std::size_t>(iv)] : -1;
        if (lu >= 0) trip.emplace_back(lu, lu, c);
        if (lv >= 0) trip.emplace_back(lv, lv, c);
        if (lu >= 0 && lv >= 0) {
            trip.emplace_back(lu, lv, -c);
            trip.emplace_back(lv, lu, -c);
        }
    }
    SpMat L(k, k);
    L.setFromTriplets(trip.begin(), trip.end());
    Eigen::VectorXd m(k);
    for (int j = 0; j < k; ++j) m[j] = s.mu()[U[static_cast<std::size_t>(j)]];
    if (k <= 800) {
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(L),
                                                                     Eigen::MatrixXd(m.asDiagonal()));
        return es.eigenvalues()[0];
    }
    Eigen::SimplicialLDLT<SpMat> solver(L);
    Rng rng(777);
    Eigen::VectorXd v = rng.normal_vector(k).normalized();
    double lam = 0.0;
    for (int it = 0; it < 100000; ++it) {
        Eigen::VectorXd y = solver.solve(m.cwiseProduct(v));
        double nv = y.norm();
        y /= nv;
        if (std::abs(nv - lam) < 1e-11 * std::max(1.0, nv)) {
            lam = nv;
            break;
        }
        lam = nv;
        v = y;
    }
    return 1.0 / lam;
}

double check_faber_krahn(const GraphSpace& s, const DoublingProfile& profile,
                         const std::vector<Ball>& balls, int subsets_per_ball, Rng& rng) {
    double best = kInf;
    for (const Ball& ball : balls) {
        std::vector<int> in_ball;
        for (int v : ball.members)
            if (s.is_interior(v)) in_ball.push_back(s.interior_index(v));
        if (in_ball.empty()) continue;
        double muB = 0.0;
        for (int i : in_ball) muB += s.mu()[i];
        std::vector<char> member(static_cast<std::size_t>(s.interior_count()), 0);
        for (int i : in_ball) member[static_cast<std::size_t>(i)] = 1;
        for (int t = 0; t < subsets_per_ball; ++t) {
            // breadth-first grown random connected subset
            std::size_t target = 1 + rng.next_below(in_ball.size());
            std::vector<int> U;
            std::vector<char> picked(static_cast<std::size_t>(s.interior_count()), 0);
            std::vector<int> frontier;
            int seed = in_ball[rng.next_below(in_ball.size())];
            U.push_back(seed);
            picked[static_cast<std::size_t>(seed)] = 1;
            frontier.push_back(seed);
            while (U.size() < target && !frontier.empty()) {
                std::size_t fi = rng.next_below(frontier.size());
                int cur = frontier[fi];
                std::vector<int> cands;
                for (auto [y, e] : s.neighbors(s.vertex_of(cur))) {
                    int iy = s.interior_index(y);
                    if (iy >= 0 && member[static_cast<std::size_t>(iy)] &&
                        !picked[static_cast<std::size_t>(iy)])
                        cands.push_back(iy);
                }
                if (cands.empty()) {
                    frontier.erase(frontier.begin() + static_cast<std::ptrdiff_t>(fi));
                    continue;
                }
                int nxt = cands[rng.next_below(cands.size())];
                picked[static_cast<std::size_t>(nxt)] = 1;
                U.push_back(nxt);
                frontier.push_back(nxt);
            }
            std::sort(U.begin(), U.end());
            double muU = 0.0;
            for (int i : U) muU += s.mu()[i];
            double lam = dirichlet_lambda1(s, U);
            double b = lam * ball.radius * ball.radius * std::pow(muU / muB, 2.0 / profile.nu);
            best = std::min(best, b);
        }
    }
    if (best == kInf) throw InputError("no admissible balls for the Faber-Krahn scan");
    return best;
}

std::vector<Ball> separated_ball_family(const GraphSpace& s, double separation, int max_centers,
                                        int radii_per_center) {
    if (separation <= 0.0) throw InputError("separation factor must be positive");
    Eigen::VectorXd bdist = s.boundary_distance();
    std::vector<Ball> out;
    int stride = std::max(1, (s.interior_count() + max_centers - 1) / max_centers);
    for (int i = 0; i < s.interior_count(); i += stride) {
        int v = s.vertex_of(i);
        Eigen::VectorXd d = s.dist_from(v);
        double r_max = s.has_boundary() ? bdist[i] / separation : kInf;
        std::set<double> rset;
        for (int y = 0; y < s.n(); ++y)
            if (d[y] > 0.0 && d[y] <= r_max) rset.insert(d[y]);
        std::vector<double> radii(rset.begin(), rset.end());
        if (radii.empty()) continue;
        std::vector<double> rsub;
        int n_r = std::min<int>(radii_per_center, static_cast<int>(radii.size()));
        for (int k = 0; k < n_r; ++k)
            rsub.push_back(radii[static_cast<std::size_t>(
                (static_cast<int>(radii.size()) - 1) * (k + 1) / n_r)]);
        for (double r : rsub) {
            Ball b{v, r, {}};
            for (int y = 0; y < s.n(); ++y)
                if (d[y] <= r) b.members.push_back(y);
            out.push_back(std::move(b));
        }
    }
    if (out.empty()) throw InputError("no admissible separated balls");
    return out;
}

std::string GraphSpace::to_json() const {
    nlohmann::ordered_json j;
    j["vertices"] = n_;
    j["interior_mask"] = interior_;
    j["mu"] = std::vector<double>(mu_.data(), mu_.data() + mu_.size());
    auto& je = j["edges"] = nlohmann::ordered_json::array();
    for (const Edge& e : edges_) je.push_back({{"u", e.u}, {"v", e.v}, {"w", e.w}, {"len", e.len}});
    j["metric_mode"] = "shortest_path";
    return j.dump(2);
}

GraphSpace GraphSpace::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    int n = j.at("vertices").get<int>();
    std::vector<bool> interior = j.at("interior_mask").get<std::vector<bool>>();
    std::vector<double> mu = j.at("mu").get<std::vector<double>>();
    std::vector<Edge> edges;
    for (const auto& je : j.at("edges"))
        edges.push_back({je.at("u").get<int>(), je.at("v").get<int>(), je.at("w").get<double>(),
                         je.at("len").get<double>()});
    Eigen::VectorXd muv = Eigen::Map<Eigen::VectorXd>(mu.data(), static_cast<Eigen::Index>(mu.size()));
    return GraphSpace(n, std::move(interior), muv, std::move(edges));
}

}  // namespace potlab
