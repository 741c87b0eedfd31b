#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dumbbell/eigensolver.hpp"
#include "dumbbell/cross_section.hpp"
#include "dumbbell/constants.hpp"

#include <cmath>

using namespace dumbbell;

namespace {

DumbbellSpec tiny_spec(double eps = 0.1)
{
    DumbbellSpec s;
    s.eps = eps;
    s.n_alpha = 10;
    s.corridor_cells = 5;
    s.rel_step = 0.2;
    s.h_far = 0.9;
    return s;
}

} // namespace

TEST_CASE("cylinder with p=1 reproduces the separated eigenvalue lambda1(Sigma) + pi^2")
{
    // separation of variables oracle: radial cross-section value + axial mode
    const double lam_sigma = cross_section_lambda1_extrapolated(3, 1000);
    const double expect = lam_sigma + PI * PI;

    const auto mesh = build_cylinder_mesh(3, 1.0, 1.0, 48, 48);
    const SparseOperator K = stiffness(mesh);
    const SparseOperator M = weighted_mass(mesh, [](double, double) { return 1.0; });
    const auto res = solve_pencil(mesh, K, M, 1, 1e-9, 0.0, nullptr, "cylinder");
    CHECK(std::abs(res.eigenvalues[0] - expect) / expect < 0.01);

    const auto mesh2 = build_cylinder_mesh(3, 1.0, 1.0, 96, 96);
    const SparseOperator K2 = stiffness(mesh2);
    const SparseOperator M2 = weighted_mass(mesh2, [](double, double) { return 1.0; });
    const auto res2 = solve_pencil(mesh2, K2, M2, 1, 1e-9, 0.0, nullptr, "cylinder");
    CHECK(std::abs(res2.eigenvalues[0] - expect) < std::abs(res.eigenvalues[0] - expect));
}

TEST_CASE("sparse solver agrees with the dense Jacobi oracle on a small mesh")
{
    const auto mesh = build_cylinder_mesh(3, 1.0, 1.0, 8, 5);
    const SparseOperator K = stiffness(mesh);
    const SparseOperator M = weighted_mass(mesh, [](double, double) { return 1.0; });
    REQUIRE(static_cast<int>(K.free2full.size()) <= 300);

    const auto sparse = solve_pencil(mesh, K, M, 5, 1e-11, 0.0, nullptr, "cylinder");
    const auto dense = dense_jacobi_pencil(Eigen::MatrixXd(K.reduced), Eigen::MatrixXd(M.reduced));
    REQUIRE(dense.size() >= 5);
    for (int i = 0; i < 5; ++i)
        CHECK(std::abs(sparse.eigenvalues[i] - dense[i]) / dense[i] < 1e-8);
}

TEST_CASE("residuals, orthonormality, positivity")
{
    const auto mesh = build_cylinder_mesh(3, 1.0, 1.0, 16, 12);
    const SparseOperator K = stiffness(mesh);
    const SparseOperator M = weighted_mass(mesh, [](double, double) { return 1.0; });
    const auto res = solve_pencil(mesh, K, M, 4, 1e-10, 0.0, nullptr, "cylinder");
    for (int i = 0; i < 4; ++i) {
        CHECK(res.residuals[i] <= 1e-10);
        CHECK(res.eigenvalues[i] > 0.0);
        for (int j = 0; j <= i; ++j) {
            const double ip = M.quad(res.eigenfields[i].values, res.eigenfields[j].values);
            CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) < 1e-8);
        }
    }
}

TEST_CASE("zero weight is rejected")
{
    const auto mesh = build_cylinder_mesh(3, 1.0, 1.0, 8, 5);
    const SparseOperator K = stiffness(mesh);
    const SparseOperator M = weighted_mass(mesh, [](double, double) { return 0.0; });
    CHECK_THROWS(solve_pencil(mesh, K, M, 1, 1e-9));
}

TEST_CASE("limit spectra of the default weight have a wide gap")
{
    const auto spec = tiny_spec();
    const auto p = PWeight::default_model();
    const auto ls = limit_spectra(spec, p, 3, 0.2, 1e-9);
    CHECK(ls.gap_rel >= 0.2);
    // lambda_1(D+) is simple
    CHECK(ls.dplus.eigenvalues[1] - ls.dplus.eigenvalues[0] > 0.0);
    // the tracked branch is the ground state of D+
    CHECK(ls.dplus.eigenvalues[0] < ls.dminus.eigenvalues[0]);
}

TEST_CASE("mirror-symmetric weight collapses the gap and errors out")
{
    auto spec = tiny_spec();
    PWeight p;
    p.bumps.push_back({5.0, 1.5, 10.0});   // distance 4 from the z=1 face
    p.bumps.push_back({-4.0, 1.5, 10.0});  // distance 4 from the z=0 face
    CHECK_THROWS_AS(limit_spectra(spec, p, 3, 0.2, 1e-9), std::runtime_error);
}

TEST_CASE("sign normalization fixes the orientation at e1")
{
    const auto spec = tiny_spec();
    const auto mesh = build_mesh(spec);
    const auto p = PWeight::default_model();
    const auto res = solve_weighted(mesh, p, 1, 1e-9);
    const auto u = sign_normalize(res.eigenfields[0]);
    DiscreteField neg = res.eigenfields[0];
    neg.values = -neg.values;
    const auto u2 = sign_normalize(neg);
    CHECK((u.values - u2.values).norm() == 0.0);

    // ground state is positive in the D+ interior after normalization
    for (const auto& pt : {Eigen::Vector2d(3.0, 1.0), Eigen::Vector2d(2.0, 0.5),
                           Eigen::Vector2d(5.0, 2.0)})
        CHECK(u.eval(pt.x(), pt.y()) > 0.0);

    DiscreteField zero;
    zero.mesh = &mesh;
    zero.values = Eigen::VectorXd::Zero(mesh.nv());
    CHECK_THROWS(sign_normalize(zero));
}

TEST_CASE("enlarging the right truncation radius does not raise lambda1(D+)")
{
    auto spec = tiny_spec();
    const auto p = PWeight::default_model();
    const auto m8 = build_half_space_mesh(spec, true);
    spec.R_right = 11.0;
    const auto m11 = build_half_space_mesh(spec, true);
    const auto r8 = solve_weighted(m8, p, 1, 1e-9);
    const auto r11 = solve_weighted(m11, p, 1, 1e-9);
    CHECK(r11.eigenvalues[0] <= r8.eigenvalues[0] * (1.0 + 1e-6));
}

TEST_CASE("dumbbell eigenvalue approaches lambda1(D+) from below as eps shrinks")
{
    // The channel coupling scales like eps^N, far below mesh-to-mesh bias, so
    // the limit eigenvalue must be discretized on the same triangulation.
    const auto p = PWeight::default_model();
    double prev_gap = 1e300;
    for (double eps : {0.2, 0.1}) {
        const auto mesh = build_mesh(tiny_spec(eps));
        const auto res = solve_weighted(mesh, p, 1, 1e-10);
        const double l0 = matched_reference_lambda(mesh, p);
        const double gap = l0 - res.eigenvalues[0];
        CHECK(gap > 0.0);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    // consistency with the independently meshed half-space value
    const auto ls = limit_spectra(tiny_spec(), p, 1, 0.2, 1e-9);
    const auto mesh = build_mesh(tiny_spec(0.1));
    const auto res = solve_weighted(mesh, p, 1, 1e-10);
    CHECK(std::abs(res.eigenvalues[0] - ls.dplus.eigenvalues[0]) / ls.dplus.eigenvalues[0] < 0.02);
}

TEST_CASE("the pipeline is dimension generic: N=4 cylinder eigenvalue")
{
    // separation of variables: lambda1(unit ball of R^3) + pi^2 = 2 pi^2
    const auto mesh = build_cylinder_mesh(4, 1.0, 1.0, 40, 40);
    const SparseOperator K = stiffness(mesh);
    const SparseOperator M = weighted_mass(mesh, [](double, double) { return 1.0; });
    const auto res = solve_pencil(mesh, K, M, 1, 1e-9, 0.0, nullptr, "cylinder4");
    const double expect = 2.0 * PI * PI;
    CHECK(std::abs(res.eigenvalues[0] - expect) / expect < 0.01);
}
