#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "potlab/potential.hpp"

#include <cmath>

using namespace potlab;

TEST_CASE("three-vertex path: capacity and equilibrium measure") {
    GraphSpace p = build_grid_space(1, 3, true);
    Operators ops(p);
    EquilibriumData eq = capacity(ops, {0});
    CHECK(eq.cap == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(eq.h[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(eq.nu_U[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(capacity(ops, {}), InputError);
}

TEST_CASE("full-interior capacity counts the boundary crossings") {
    GraphSpace p = build_grid_space(1, 5, true);
    Operators ops(p);
    std::vector<int> all = {0, 1, 2};
    EquilibriumData eq = capacity(ops, all);
    CHECK((eq.h - ScalarField::Ones(3)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(eq.cap == doctest::Approx(2.0).epsilon(1e-14));
    // total equilibrium mass equals the capacity
    CHECK(eq.nu_U.sum() == doctest::Approx(eq.cap).epsilon(1e-12));
    CHECK(eq.nu_U.minCoeff() >= -1e-14);
}

TEST_CASE("equilibrium mass equals capacity in general") {
    GraphSpace g = build_grid_space(2, 8, true);
    Operators ops(g);
    EquilibriumData eq = capacity(ops, g.ball_interior(3 + 3 * 8, 1.0));
    CHECK(eq.nu_U.sum() == doctest::Approx(eq.cap).epsilon(1e-11));
    CHECK(eq.h.maxCoeff() <= 1.0 + 1e-12);
    CHECK(eq.h.minCoeff() >= -1e-12);
    // monotonicity in the set
    EquilibriumData bigger = capacity(ops, g.ball_interior(3 + 3 * 8, 2.0));
    CHECK(bigger.cap >= eq.cap);
}

TEST_CASE("power-energy identity: tau = 1 exact, tau = 2 on the path gives 3/4") {
    GraphSpace p3 = build_grid_space(1, 3, true);
    Operators ops3(p3);
    EquilibriumData eq3 = capacity(ops3, {0});
    HtauCheck c2 = htau_energy_check(ops3, eq3, 2.0);
    CHECK(c2.ratio == doctest::Approx(0.75).epsilon(1e-13));
    CHECK(c2.lhs == doctest::Approx(2.0).epsilon(1e-13));

    GraphSpace g = build_grid_space(3, 7, true);
    Operators ops(g);
    EquilibriumData eq = capacity(ops, g.ball_interior(3 + 3 * 7 + 3 * 49, 1.0));
    HtauCheck c1 = htau_energy_check(ops, eq, 1.0);
    CHECK(c1.ratio == doctest::Approx(1.0).epsilon(1e-12));
    for (double tau : {0.6, 0.75, 2.0, 4.0}) {
        HtauCheck c = htau_energy_check(ops, eq, tau);
        CHECK(c.lhs <= c.rhs * 1.25);  // small discretization slack only
    }
    CHECK_THROWS_AS(htau_energy_check(ops, eq, 0.5), InputError);
    CHECK_THROWS_AS(htau_energy_check(ops, eq, -1.0), InputError);
}

TEST_CASE("superharmonicity of equilibrium potentials and Green powers") {
    GraphSpace g = build_grid_space(3, 7, true);
    Operators ops(g);
    int center = 3 + 3 * 7 + 3 * 49;
    EquilibriumData eq = capacity(ops, g.ball_interior(center, 1.0));
    std::vector<double> ts = {0.1, 1.0, 10.0};
    CHECK(is_superharmonic(ops, eq.h, ts).ok);
    ScalarField G = ops.green_column(g.interior_index(center));
    for (double tau : {0.25, 0.5, 1.0})
        CHECK(is_superharmonic(ops, G.array().pow(tau).matrix(), ts).ok);
    // a subharmonic field is rejected
    CHECK(!is_superharmonic(ops, -eq.h, ts).ok);
}

TEST_CASE("Hardy constant: zero for constants, bounded for equilibrium weights") {
    GraphSpace g = build_grid_space(3, 7, true);
    Operators ops(g);
    CHECK(hardy_constant(ops, ScalarField::Ones(ops.nI()), 0.5) == 0.0);

    EquilibriumData eq = capacity(ops, g.ball_interior(3 + 3 * 7 + 3 * 49, 1.0));
    for (double delta : {0.0, 0.5, -1.0}) {
        double bound = 4.0 / ((1.0 - delta) * (1.0 - delta));
        CHECK(hardy_constant(ops, eq.h, delta) <= bound * 1.5);
    }
    CHECK_THROWS_AS(hardy_constant(ops, eq.h, 1.0), InputError);
    ScalarField bad = eq.h;
    bad[0] = 0.0;
    CHECK_THROWS_AS(hardy_constant(ops, bad, 0.0), InputError);
}

TEST_CASE("parabolicity diagnostic scales linearly in the edge weight") {
    GraphSpace p = build_grid_space(1, 3, true);
    Operators ops(p);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(ops.nE());
    double e1 = parabolicity_diagnostic(ops, ones, {0}, {});
    CHECK(e1 == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(parabolicity_diagnostic(ops, 0.5 * ones, {0}, {}) ==
          doctest::Approx(1.0).epsilon(1e-13));

    // a weight decaying away from the pole lowers the relative capacity
    GraphSpace path = build_grid_space(1, 21, true);
    Operators opsl(path);
    Eigen::VectorXd dec(opsl.nE());
    for (int e = 0; e < opsl.nE(); ++e)
        dec[e] = 1.0 / (1.0 + std::abs(e - opsl.nE() / 2));
    double flat = parabolicity_diagnostic(opsl, Eigen::VectorXd::Ones(opsl.nE()),
                                          {path.interior_index(10)}, {});
    double decayed = parabolicity_diagnostic(opsl, dec, {path.interior_index(10)}, {});
    CHECK(decayed < flat);
}
