#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "potlab/mv.hpp"
#include "potlab/trace.hpp"

#include <cmath>

using namespace potlab;

TEST_CASE("zero potential: vanishing form constant and representing form") {
    GraphSpace g = build_grid_space(2, 6, true);
    Operators ops(g);
    Potential V = Potential::function(ScalarField::Zero(ops.nI()));
    CHECK(form_constant_A(ops, V) == 0.0);
    CHECK(representing_form(ops, V).cwiseAbs().maxCoeff() == 0.0);
    CHECK(multiplier_constant_B(ops, EdgeField::Zero(ops.nE())) == 0.0);
}

TEST_CASE("three-vertex path: closed forms for the point potential") {
    GraphSpace p = build_grid_space(1, 3, true);
    Operators ops(p);
    Potential V = Potential::function(ScalarField::Ones(1));
    CHECK(form_constant_A(ops, V) == doctest::Approx(0.5).epsilon(1e-12));
    EdgeField theta = representing_form(ops, V);
    CHECK(theta.cwiseAbs().maxCoeff() == doctest::Approx(0.5).epsilon(1e-13));
    // |theta|^2 at the single interior vertex is 1/4, so B = G * 1/4 = 1/8
    CHECK(multiplier_constant_B(ops, theta) == doctest::Approx(0.125).epsilon(1e-12));
    MVReport rep = mv_verify(ops, V, {make_ball(p, 1, 0.0)});
    CHECK(rep.ratio_forward == doctest::Approx(0.5 / (2.0 * std::sqrt(0.125))).epsilon(1e-10));
    CHECK(rep.ratio_forward <= 1.0 + 1e-9);
    CHECK(rep.capacitary_Cprime > 0.0);
}

TEST_CASE("nonnegative densities: form constant equals the trace constant") {
    GraphSpace g = build_grid_space(3, 6, true);
    Operators ops(g);
    Rng rng(401);
    for (int k = 0; k < 3; ++k) {
        ScalarField q = rng.normal_vector(ops.nI()).cwiseAbs();
        double A = form_constant_A(ops, Potential::function(q));
        CHECK(A == doctest::Approx(trace_c1(ops, q)).epsilon(1e-9));
    }
}

TEST_CASE("representing form is the projection of the divergence datum") {
    GraphSpace g = build_grid_space(2, 7, true);
    Operators ops(g);
    Rng rng(403);
    // exact data are reproduced
    ScalarField psi = rng.normal_vector(ops.nI());
    EdgeField exact = ops.d(psi);
    EdgeField theta = representing_form(ops, Potential::divergence_form(exact));
    CHECK((theta - exact).cwiseAbs().maxCoeff() < 1e-10);
    // generic data are contracted and reduced to the same weak equation
    EdgeField theta0 = rng.normal_vector(ops.nE());
    EdgeField t2 = representing_form(ops, Potential::divergence_form(theta0));
    CHECK((t2 - ops.hodge_project(theta0)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(ops.edge_inner(t2, t2) <= ops.edge_inner(theta0, theta0) * (1.0 + 1e-12));
}

TEST_CASE("homogeneity of the two constants") {
    GraphSpace g = build_grid_space(2, 7, true);
    Operators ops(g);
    Rng rng(407);
    ScalarField f = rng.normal_vector(ops.nI());
    double A = form_constant_A(ops, Potential::function(f));
    CHECK(form_constant_A(ops, Potential::function(-3.0 * f)) ==
          doctest::Approx(3.0 * A).epsilon(1e-9));
    EdgeField theta = rng.normal_vector(ops.nE());
    double B = multiplier_constant_B(ops, theta);
    CHECK(multiplier_constant_B(ops, 2.0 * theta) == doctest::Approx(4.0 * B).epsilon(1e-9));
}

TEST_CASE("forward bound holds for divergence-form potentials") {
    GraphSpace g = build_grid_space(3, 6, true);
    Operators ops(g);
    Rng rng(409);
    for (int k = 0; k < 20; ++k) {
        EdgeField theta0 = rng.normal_vector(ops.nE());
        Potential V = Potential::divergence_form(theta0);
        double A = form_constant_A(ops, V);
        double B = multiplier_constant_B(ops, representing_form(ops, V));
        CHECK(A <= 2.0 * std::sqrt(B) * (1.0 + 1e-9));
    }
}

TEST_CASE("far-field decay of a compactly supported projector potential") {
    GraphSpace g = build_grid_space(3, 13, true);
    Operators ops(g);
    int o = 6 + 6 * 13 + 6 * 169;
    Eigen::VectorXd d_o = g.dist_from(o);
    Rng rng(411);
    EdgeField beta = EdgeField::Zero(ops.nE());
    const auto& edges = g.edges();
    for (int e = 0; e < ops.nE(); ++e) {
        const Edge& ed = edges[static_cast<std::size_t>(e)];
        if (d_o[ed.u] <= 1.0 && d_o[ed.v] <= 1.0) beta[e] = rng.normal();
    }
    double expo = decay_estimate_probe(ops, beta, o, 1.0);
    CHECK(expo > 0.8);  // at least Green-type decay away from the support
    CHECK(std::isfinite(expo));
    CHECK_THROWS_AS(decay_estimate_probe(ops, EdgeField::Zero(ops.nE()), o, 1.0), InputError);
    CHECK_THROWS_AS(decay_estimate_probe(ops, beta, o, 0.1), InputError);
}
