#include "potlab/profile.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <functional>
#include <map>

namespace potlab {

double RadialProfile::value(double rho) const {
    if (rho > R_cut) return V_cut() * std::pow(rho / R_cut, nu);
    auto it = std::upper_bound(r.begin(), r.end(), rho);
    std::size_t j = static_cast<std::size_t>(it - r.begin());
    return V[j == 0 ? 0 : j - 1];  // j==0 cannot happen for rho >= 0 since r[0]==0
}

double RadialProfile::moment(double d0, double p) const {
    if (nu <= p + 1.0)
        throw TailDivergesError("radial moment diverges: tail exponent nu <= p+1");
    double tot = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) {
        double a = r[j];
        double b = (j + 1 < r.size()) ? r[j + 1] : R_cut;
        double lo = std::max(a, d0);
        if (lo < b) tot += (std::pow(b, p + 1.0) - std::pow(lo, p + 1.0)) / ((p + 1.0) * V[j]);
    }
    double lo = std::max(d0, R_cut);
    tot += std::pow(R_cut, nu) / V_cut() * std::pow(lo, p + 1.0 - nu) / (nu - p - 1.0);
    return tot;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    struct Rec {
        static double go(const std::function<double(double)>& f, double a, double b, double fa,
                         double fm, double fb, double whole, double tol, int depth) {
            double m = 0.5 * (a + b);
            double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            double flm = f(lm), frm = f(rm);
            double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
                return left + right + (left + right - whole) / 15.0;
            return go(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
                   go(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
        }
    };
    if (!(a < b)) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return Rec::go(f, a, b, fa, fm, fb, whole, tol, 48);
}

double truncated_heat_moment(double c, double beta) {
    // ∫_0^1 e^{-c/t} t^{beta-1} dt = c^beta * Gamma(-beta, c) by u = c/t.
    return std::pow(c, beta) * boost::math::tgamma<double>(-beta, c);
}

double RadialProfile::heat_integral(double d, double D, double s) const {
    if (nu <= 2.0 * s)
        throw TailDivergesError("heat-type integral diverges: tail exponent nu <= 2s");
    double a = d * d / D;
    double tot = 0.0;
    double T = R_cut * R_cut;
    // empirical steps: V(sqrt(t)) = V[j] for t in [r[j]^2, r[j+1]^2)
    for (std::size_t j = 0; j < r.size(); ++j) {
        double t1 = r[j] * r[j];
        double t2 = (j + 1 < r.size()) ? r[j + 1] * r[j + 1] : T;
        if (t1 >= t2) continue;
        if (a == 0.0) {
            tot += (std::pow(t2, s) - std::pow(t1, s)) / (s * V[j]);
        } else {
            auto f = [&](double t) {
                return t > 0.0 ? std::exp(-a / t) * std::pow(t, s - 1.0) : 0.0;
            };
            tot += adaptive_simpson(f, t1, t2, 1e-10 * std::max(1.0, std::pow(t2, s))) / V[j];
        }
    }
    // tail: t >= T, V(sqrt(t)) = V_cut (t/T)^{nu/2}
    double beta = s - 0.5 * nu;  // < 0
    double tail;
    if (a == 0.0)
        tail = std::pow(T, beta) / (-beta);
    else
        tail = std::pow(a, beta) * boost::math::tgamma_lower<double>(-beta, a / T);
    tot += std::pow(R_cut, nu) / V_cut() * tail;
    return tot;
}

double RadialProfile::kappa() const {
    // suffix maxima of A_k = V[k]/r[k]^nu over jump points (skip r=0); the analytic tail
    // keeps A constant at its R_cut value, so it adds no new candidate.
    double k = 1.0;
    double suffix = 0.0;
    for (std::size_t j = r.size(); j-- > 1;) {
        suffix = std::max(suffix, V[j] / std::pow(r[j], nu));
        // r -> r[j] from the left has V = V[j-1]; any R >= r[j] is covered by suffix
        k = std::max(k, std::pow(r[j], nu) / V[j - 1] * suffix);
    }
    return k;
}

RadialProfile profile_from_distances(const Eigen::VectorXd& dists, const Eigen::VectorXd& masses,
                                     double R_cut, double nu) {
    std::map<double, double> by_r;
    for (Eigen::Index i = 0; i < dists.size(); ++i)
        if (dists[i] <= R_cut) by_r[dists[i]] += masses[i];
    if (by_r.empty() || by_r.begin()->first != 0.0)
        throw InputError("profile center must carry positive mass at distance 0");
    RadialProfile p;
    p.R_cut = R_cut;
    p.nu = nu;
    double acc = 0.0;
    for (auto& [rad, m] : by_r) {
        acc += m;
        p.r.push_back(rad);
        p.V.push_back(acc);
    }
    return p;
}

}  // namespace potlab
