#include "potlab/cloud.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

namespace potlab {

MetricMeasureCloud::MetricMeasureCloud(Eigen::MatrixXd metric, Eigen::VectorXd mass, double nu_amb,
                                       std::optional<double> R_cut)
    : metric_(std::move(metric)), mass_(std::move(mass)), nu_amb_(nu_amb) {
    int n = static_cast<int>(mass_.size());
    if (metric_.rows() != n || metric_.cols() != n) throw InputError("metric size mismatch");
    if ((mass_.array() <= 0.0).any()) throw InputError("point masses must be strictly positive");
    if (nu_amb_ <= 0.0) throw InputError("growth exponent must be positive");
    for (int i = 0; i < n; ++i) {
        if (metric_(i, i) != 0.0) throw InputError("metric diagonal must vanish");
        for (int j = 0; j < i; ++j) {
            if (metric_(i, j) != metric_(j, i)) throw InputError("metric must be symmetric");
            if (metric_(i, j) <= 0.0) throw InputError("distinct points need positive distance");
            for (int k = 0; k < n; ++k)
                if (metric_(i, j) > metric_(i, k) + metric_(k, j) + 1e-12)
                    throw InputError("metric violates the triangle inequality");
        }
    }
    R_cut_ = R_cut.value_or(n > 1 ? metric_.maxCoeff() : 1.0);
    kappa_ = 1.0;
    profiles_.reserve(static_cast<std::size_t>(n));
    for (int x = 0; x < n; ++x) {
        profiles_.push_back(profile_from_distances(Eigen::VectorXd(metric_.row(x).transpose()),
                                                   mass_, R_cut_, nu_amb_));
        kappa_ = std::max(kappa_, profiles_.back().kappa());
    }
}

MetricMeasureCloud make_lattice_cloud(int dim, int per_side, double nu_amb) {
    if (dim < 1 || dim > 3) throw InputError("lattice cloud dimension must be 1, 2 or 3");
    int n = 1;
    for (int k = 0; k < dim; ++k) n *= per_side;
    Eigen::MatrixXi coords(n, dim);
    for (int v = 0; v < n; ++v) {
        int t = v;
        for (int k = 0; k < dim; ++k) {
            coords(v, k) = t % per_side;
            t /= per_side;
        }
    }
    Eigen::MatrixXd metric(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < dim; ++k) {
                double dk = coords(i, k) - coords(j, k);
                s += dk * dk;
            }
            metric(i, j) = std::sqrt(s);
        }
    return MetricMeasureCloud(std::move(metric), Eigen::VectorXd::Ones(n), nu_amb);
}

std::string MetricMeasureCloud::to_json() const {
    nlohmann::ordered_json j;
    j["points"] = n();
    auto& jm = j["metric"] = nlohmann::ordered_json::array();
    for (int i = 0; i < n(); ++i)
        jm.push_back(std::vector<double>(metric_.row(i).begin(), metric_.row(i).end()));
    j["mass"] = std::vector<double>(mass_.data(), mass_.data() + mass_.size());
    j["R_cut"] = R_cut_;
    j["nu_amb"] = nu_amb_;
    return j.dump(2);
}

MetricMeasureCloud MetricMeasureCloud::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    int n = j.at("points").get<int>();
    Eigen::MatrixXd metric(n, n);
    const auto& jm = j.at("metric");
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) metric(i, k) = jm.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)).get<double>();
    std::vector<double> mass = j.at("mass").get<std::vector<double>>();
    Eigen::VectorXd mv = Eigen::Map<Eigen::VectorXd>(mass.data(), static_cast<Eigen::Index>(mass.size()));
    return MetricMeasureCloud(std::move(metric), mv, j.at("nu_amb").get<double>(),
                              j.at("R_cut").get<double>());
}

}  // namespace potlab
