#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace potlab {

using ScalarField = Eigen::VectorXd;  // one value per interior vertex, boundary implicitly 0
using EdgeField = Eigen::VectorXd;    // one value per oriented edge
using Weight = Eigen::VectorXd;       // strictly positive, per interior vertex
using SpMat = Eigen::SparseMatrix<double>;

struct EmptyBoundaryError : std::runtime_error {
    EmptyBoundaryError() : std::runtime_error("operation requires a nonempty Dirichlet boundary") {}
};

struct TailDivergesError : std::runtime_error {
    explicit TailDivergesError(const std::string& what) : std::runtime_error(what) {}
};

struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// A certified mathematical invariant failed at run time (distinct from bad input).
struct AssertionError : std::runtime_error {
    explicit AssertionError(const std::string& invariant, const std::string& detail)
        : std::runtime_error("invariant violated: " + invariant + " (" + detail + ")"),
          invariant_name(invariant) {}
    std::string invariant_name;
};

// Deterministic splitmix64-based generator; used everywhere randomness is needed so that
// runs are reproducible for a fixed seed regardless of platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // integer in [0, n)
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    // standard normal via Box-Muller (always consumes two draws)
    double normal() {
        double u1 = next_double(), u2 = next_double();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    Eigen::VectorXd normal_vector(Eigen::Index n) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

  private:
    std::uint64_t state_;
};

// Result of a power iteration for an operator norm / spectral radius.
struct NormEstimate {
    double value = 0.0;
    bool converged = true;  // false: the returned value is only a certified lower bound
    int iterations = 0;
};

inline double rel_diff(double a, double b) {
    double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

}  // namespace potlab
