#pragma once

#include "potlab/common.hpp"
#include "potlab/profile.hpp"

#include <optional>

namespace potlab {

// Finite metric measure space with an ambient volume-growth law: the doubling-space model.
class MetricMeasureCloud {
  public:
    // R_cut defaults to the largest pairwise distance so every center shares a consistent
    // analytic tail (the kernel lemmas are stated for one global doubling constant).
    MetricMeasureCloud(Eigen::MatrixXd metric, Eigen::VectorXd mass, double nu_amb,
                       std::optional<double> R_cut = std::nullopt);

    int n() const { return static_cast<int>(mass_.size()); }
    double dist(int x, int y) const { return metric_(x, y); }
    const Eigen::MatrixXd& metric() const { return metric_; }
    const Eigen::VectorXd& mass() const { return mass_; }
    double nu_amb() const { return nu_amb_; }
    double R_cut() const { return R_cut_; }

    const RadialProfile& profile(int x) const { return profiles_[static_cast<std::size_t>(x)]; }
    double volume(int x, double r) const { return profile(x).value(r); }

    // Continuum-valid certified doubling constant over all centers (empirical + tail).
    double kappa() const { return kappa_; }
    double gamma() const { return std::max(1.0, kappa_) * std::pow(2.0, nu_amb_); }

    std::string to_json() const;
    static MetricMeasureCloud from_json(const std::string& text);

  private:
    Eigen::MatrixXd metric_;
    Eigen::VectorXd mass_;
    double nu_amb_;
    double R_cut_;
    double kappa_;
    std::vector<RadialProfile> profiles_;
};

// Uniform unit-mass lattice segment/square/cube cloud with Euclidean metric and spacing 1.
MetricMeasureCloud make_lattice_cloud(int dim, int per_side, double nu_amb);

}  // namespace potlab
