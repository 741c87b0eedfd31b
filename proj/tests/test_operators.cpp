#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dumbbell/operators.hpp"
#include "dumbbell/constants.hpp"
#include "dumbbell/cross_section.hpp"

#include <cmath>
#include <random>

using namespace dumbbell;

namespace {

DumbbellSpec small_spec()
{
    DumbbellSpec s;
    s.eps = 0.1;
    s.n_alpha = 12;
    s.corridor_cells = 6;
    return s;
}

DiscreteField coordinate_field(const MeridianMesh& m, bool z_coord)
{
    DiscreteField f;
    f.mesh = &m;
    f.values.resize(m.nv());
    for (int i = 0; i < m.nv(); ++i) f.values[i] = z_coord ? m.verts[i].x() : 1.0;
    return f;
}

FieldExpr x1_over_r3()
{
    FieldExpr e;
    e.val = [](double z, double s) {
        const double r = std::sqrt(z * z + s * s);
        return z / (r * r * r);
    };
    e.grad = [](double z, double s) -> Eigen::Vector2d {
        const double r2 = z * z + s * s, r = std::sqrt(r2);
        const double r3 = r * r2, r5 = r3 * r2;
        return {1.0 / r3 - 3.0 * z * z / r5, -3.0 * z * s / r5};
    };
    return e;
}

} // namespace

TEST_CASE("stiffness energy of u = x1 over the corridor equals the cylinder volume")
{
    const auto mesh = build_mesh(small_spec());
    const auto u = coordinate_field(mesh, true);
    const auto r = region_integral(
        mesh, [](double z, double s) { return z > 0 && z < 1 && s < 0.1; }, u,
        [](const Eigen::Vector2d&, double, const Eigen::Vector2d& g) { return g.squaredNorm(); });
    CHECK(!r.empty);
    CHECK(std::abs(r.value - PI * 0.01) < 1e-4);

    const auto c = coordinate_field(mesh, false);
    const auto rc = region_integral(
        mesh, [](double z, double s) { return z > 0 && z < 1 && s < 0.1; }, c,
        [](const Eigen::Vector2d&, double, const Eigen::Vector2d& g) { return g.squaredNorm(); });
    CHECK(rc.value == 0.0);
}

TEST_CASE("assembled matrices are symmetric to 1e-12")
{
    const auto mesh = build_mesh(small_spec());
    const auto K = stiffness(mesh);
    CHECK(K.symmetry_defect() < 1e-12);
    const auto M = weighted_mass(mesh, [](double, double) { return 1.0; });
    CHECK(M.symmetry_defect() < 1e-12);
}

TEST_CASE("weighted mass with the corridor indicator gives the cylinder volume")
{
    const auto mesh = build_mesh(small_spec());
    const auto M = weighted_mass(mesh, [](double z, double s) {
        return (z >= 0 && z <= 1 && s <= 0.1 + 1e-12) ? 1.0 : 0.0;
    });
    const auto one = coordinate_field(mesh, false);
    // the indicator weight is point-sampled, so the cut is resolved only to
    // the quadrature band around the corridor interface
    CHECK(M.quad(one.values, one.values) == doctest::Approx(PI * 0.01).epsilon(1e-2));

    const auto Z = weighted_mass(mesh, [](double, double) { return 0.0; });
    CHECK(Z.full.norm() == 0.0);

    CHECK_THROWS(weighted_mass(mesh, [](double, double) { return -1.0; }));

    // positive semidefiniteness on a random field
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Eigen::VectorXd v(mesh.nv());
    for (int i = 0; i < mesh.nv(); ++i) v[i] = U(rng);
    CHECK(M.quad(v, v) >= 0.0);
}

TEST_CASE("surface integral of x1/|x|^3 over a left half sphere")
{
    const auto mesh = build_mesh(small_spec());
    const auto up3 = angular_profile(3, 64);
    const auto e = x1_over_r3();
    for (double lam : {1.0, 2.0, 4.0}) {
        const auto c = curve(mesh, CurveKind::half_sphere_left, lam, 48);
        const double got = surface_integral(e, c, SurfIntegrand::u2);
        const double expect = up3.upsilonN * up3.upsilonN / (lam * lam);
        CHECK(got == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("surface integral of a constant is c^2 times the measure")
{
    const auto mesh = build_mesh(small_spec());
    const auto c = curve(mesh, CurveKind::half_sphere_left, 2.0, 32);
    FieldExpr e;
    e.val = [](double, double) { return 3.0; };
    e.grad = [](double, double) -> Eigen::Vector2d { return {0, 0}; };
    CHECK(surface_integral(e, c, SurfIntegrand::u2) ==
          doctest::Approx(9.0 * c.measure()).epsilon(1e-12));
}

TEST_CASE("doubling a field scales quadratic surface integrals exactly by 4")
{
    const auto mesh = build_mesh(small_spec());
    DiscreteField u;
    u.mesh = &mesh;
    u.values.resize(mesh.nv());
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int i = 0; i < mesh.nv(); ++i) u.values[i] = U(rng);
    DiscreteField u2 = u;
    u2.values *= 2.0;
    const auto g = recover_gradients(u);
    const auto g2 = recover_gradients(u2);
    const auto c = curve(mesh, CurveKind::half_sphere_left, 0.7, 24);
    const double a = surface_integral(u, g, c, SurfIntegrand::u2);
    const double b = surface_integral(u2, g2, c, SurfIntegrand::u2);
    CHECK(b == 4.0 * a);
}

TEST_CASE("Green identity residual of a discrete harmonic field shrinks at rate >= 1")
{
    // Dirichlet solve on a cylinder with a unit flux source on the far disk,
    // then compare volume energy and boundary flux pairing on a slice.
    double res[2];
    const int nz[2] = {16, 32};
    for (int pass = 0; pass < 2; ++pass) {
        const auto mesh = build_cylinder_mesh(3, 1.0, 1.0, nz[pass], nz[pass]);
        const auto K = stiffness(mesh);
        std::vector<Eigen::Vector2d> pts;
        std::vector<double> wts;
        std::vector<double> gx, gw;
        gauss_legendre(64, 0.0, 1.0, gx, gw);
        for (int q = 0; q < 64; ++q) {
            pts.emplace_back(1.0 - 1e-12, gx[q]);
            wts.push_back(omega_meridian(3) * gx[q] * gw[q]);
        }
        const auto rhs = line_source(mesh, pts, wts, [](double, double) { return 1.0; });
        const auto w = solve_dirichlet(mesh, K, rhs);
        const auto g = recover_gradients(w);
        const double r = 0.5;
        const auto energy = region_integral(
            mesh, [&](double z, double) { return z < r; }, w,
            [](const Eigen::Vector2d&, double, const Eigen::Vector2d& gg) { return gg.squaredNorm(); });
        const auto sl = curve(mesh, CurveKind::slice, r, 48);
        const double flux = surface_integral(w, g, sl, SurfIntegrand::u_dnu);
        res[pass] = std::abs(energy.value - flux) / std::abs(flux);
    }
    CHECK(res[1] < res[0] / std::pow(2.0, 0.99));
}

TEST_CASE("empty region integral returns the empty flag")
{
    const auto mesh = build_mesh(small_spec());
    const auto r = region_integral(mesh, [](double, double) { return false; },
                                   [](double, double) { return 1.0; });
    CHECK(r.empty);
    CHECK(r.value == 0.0);
}

TEST_CASE("weighted corridor volume matches pi eps^2 for N=3")
{
    const auto mesh = build_mesh(small_spec());
    const auto r = region_integral(mesh,
                                   [](double z, double s) { return z > 0 && z < 1 && s < 0.1; },
                                   [](double, double) { return 1.0; });
    CHECK(std::abs(r.value - PI * 0.01) < 1e-6);
}

TEST_CASE("boundary mass on the Steklov arc integrates the surface measure")
{
    const auto mesh = build_exterior_annulus(3, 8.0, 16, 0.15, 0.8);
    const auto B = boundary_mass(mesh, BTag::inner_sphere);
    Eigen::VectorXd one = Eigen::VectorXd::Ones(mesh.nv());
    // polygonal half sphere: approaches 2 pi from below at this resolution
    CHECK(B.quad(one, one) == doctest::Approx(2.0 * PI).epsilon(5e-3));
}
