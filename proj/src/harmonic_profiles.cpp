#include "dumbbell/harmonic_profiles.hpp"
#include "dumbbell/constants.hpp"

#include <cmath>
#include <stdexcept>

namespace dumbbell {

FieldExpr eval_f(const CrossSectionSpectrum& cs)
{
    const double g = cs.sqrt_lambda1();
    FieldExpr e;
    e.val = [cs, g](double z, double s) { return std::exp(-g * (z - 1.0)) * cs.psi1(s); };
    e.grad = [cs, g](double z, double s) -> Eigen::Vector2d {
        const double ex = std::exp(-g * (z - 1.0));
        const double h = 1e-6;
        const double dpsi = (cs.psi1(std::min(s + h, 1.0)) - cs.psi1(std::max(s - h, 0.0))) /
                            (std::min(s + h, 1.0) - std::max(s - h, 0.0));
        return {-g * ex * cs.psi1(s), ex * dpsi};
    };
    return e;
}

FieldExpr eval_h(const CrossSectionSpectrum& cs)
{
    const FieldExpr f = eval_f(cs);
    FieldExpr e;
    e.val = [f](double z, double s) { return f.val(1.0 - z, s); };
    e.grad = [f](double z, double s) -> Eigen::Vector2d {
        const Eigen::Vector2d g = f.grad(1.0 - z, s);
        return {-g.x(), g.y()};
    };
    return e;
}

namespace {

// exact assembly of int_Sigma phi s^{N-2} ds over the junction-disk facets
Eigen::VectorXd sigma_source(const ModelDomainMesh& md)
{
    const MeridianMesh& m = md.mesh;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m.nv());
    std::vector<double> gx, gw;
    gauss_legendre(4, 0.0, 1.0, gx, gw);
    for (const auto& [a, b] : md.sigma_edges) {
        const double s0 = m.verts[a].y(), s1 = m.verts[b].y();
        const double len = std::abs(s1 - s0);
        for (size_t q = 0; q < gx.size(); ++q) {
            const double s = s0 + gx[q] * (s1 - s0);
            const double w = omega_meridian(m.N) * std::pow(s, m.N - 2) * len * gw[q];
            rhs[a] += w * (1.0 - gx[q]);
            rhs[b] += w * gx[q];
        }
    }
    return rhs;
}

} // namespace

DiscreteField compute_phi1(const ModelDomainMesh& md)
{
    const MeridianMesh& m = md.mesh;
    const SparseOperator K = stiffness(m);
    const Eigen::VectorXd rhs = sigma_source(md);
    DiscreteField w = solve_dirichlet(m, K, rhs);
    DiscreteField phi1 = w;
    for (int i = 0; i < m.nv(); ++i)
        phi1.values[i] += std::max(m.verts[i].x() - 1.0, 0.0);
    return phi1;
}

DiscreteField compute_phi2(const ModelDomainMesh& md, const CrossSectionSpectrum& cs)
{
    const MeridianMesh& m = md.mesh;
    const SparseOperator K = stiffness(m);

    // dpsi/dnu at the wall, one-sided second order from the radial table
    const size_t n = cs.psi.size() - 1;
    const double hgrid = cs.grid[1] - cs.grid[0];
    const double dpsi_wall = (-4.0 * cs.psi[n - 1] + cs.psi[n - 2]) / (2.0 * hgrid);
    if (dpsi_wall >= 0.0) throw std::runtime_error("compute_phi2: wall flux of psi1 must be negative");

    const double g = cs.sqrt_lambda1();
    // lateral source on {z > 1, s = 1}; stop inside the polygonal outer arc
    // (the chords of the truncation circle cut slightly inward)
    const double R_eff = 0.99 * md.R;
    const double zmax = std::min(1.0 + std::sqrt(R_eff * R_eff - 1.0), 1.0 + 40.0 / g);
    std::vector<Eigen::Vector2d> pts;
    std::vector<double> wts;
    std::vector<double> gx, gw;
    gauss_legendre(4, 0.0, 1.0, gx, gw);
    const double panel = 0.02;
    for (double z0 = 1.0; z0 < zmax; z0 += panel) {
        const double z1 = std::min(z0 + panel, zmax);
        for (size_t q = 0; q < gx.size(); ++q) {
            pts.emplace_back(z0 + gx[q] * (z1 - z0), 1.0);
            wts.push_back(omega_meridian(m.N) * (z1 - z0) * gw[q]);
        }
    }
    const Eigen::VectorXd rhs = line_source(
        m, pts, wts,
        [&](double z, double) { return -dpsi_wall * std::exp(-g * (z - 1.0)); });

    DiscreteField w = solve_dirichlet(m, K, rhs);
    DiscreteField phi2 = w;
    const FieldExpr f = eval_f(cs);
    for (int i = 0; i < m.nv(); ++i)
        if (m.verts[i].y() < 1.0 - 1e-14)
            phi2.values[i] += f.val(m.verts[i].x(), m.verts[i].y());
    return phi2;
}

ProfilePair compute_profiles(const ModelDomainMesh& md, const CrossSectionSpectrum& cs)
{
    ProfilePair p;
    p.domain = &md;
    p.phi1 = compute_phi1(md);
    p.phi2 = compute_phi2(md, cs);
    return p;
}

FieldExpr kelvin(const FieldExpr& v, const Eigen::Vector2d& center, int N)
{
    FieldExpr e;
    e.val = [v, center, N](double z, double s) {
        const Eigen::Vector2d d(z - center.x(), s - center.y());
        const double r2 = d.squaredNorm();
        if (r2 == 0.0) throw std::invalid_argument("kelvin: evaluation at the center");
        const Eigen::Vector2d y = center + d / r2;
        return std::pow(r2, 0.5 * (2 - N)) * v.val(y.x(), y.y());
    };
    e.grad = [v, center, N](double z, double s) -> Eigen::Vector2d {
        const Eigen::Vector2d d(z - center.x(), s - center.y());
        const double r2 = d.squaredNorm();
        if (r2 == 0.0) throw std::invalid_argument("kelvin: evaluation at the center");
        const double rho_pow = std::pow(r2, 0.5 * (2 - N));  // |x-c|^{2-N}
        const Eigen::Vector2d y = center + d / r2;
        const double vy = v.val(y.x(), y.y());
        const Eigen::Vector2d gy = v.grad(y.x(), y.y());
        // J_ij = d y_j / d x_i = delta_ij / r2 - 2 d_i d_j / r2^2
        const Eigen::Vector2d Jg = gy / r2 - 2.0 * d * (d.dot(gy)) / (r2 * r2);
        return (2.0 - N) * std::pow(r2, -0.5 * N) * d * vy + rho_pow * Jg;
    };
    return e;
}

EnvelopeReport check_envelopes(const DiscreteField& u_eps, const ProfilePair& profiles,
                               double eps, const CrossSectionSpectrum& cs)
{
    const ModelDomainMesh& md = *profiles.domain;
    const MeridianMesh& dumbbell = *u_eps.mesh;
    const double g = cs.sqrt_lambda1();
    const double gamma_eps = 1.0 / (2.0 * eps * std::exp(g / (4.0 * eps)));
    const double gamma_tilde = 1.0 / (std::sqrt(2.0) * eps * std::exp(g / (2.0 * std::sqrt(2.0) * eps)));

    const auto Phi1 = [&](double z, double s) { return profiles.phi1.eval(z, s); };
    const auto Phi2 = [&](double z, double s) { return profiles.phi2.eval(z, s); };
    // model-mesh coordinates of the scaled arguments e1 + (x - e1)/a
    const auto upper = [&](double z, double s) {
        return eps * Phi1(1.0 + (z - 1.0) / eps, s / eps) +
               2.0 * gamma_eps * eps * Phi2(1.0 + (z - 1.0) / (2.0 * eps), s / (2.0 * eps));
    };
    const auto lower = [&](double z, double s) {
        return eps * Phi1(1.0 + (z - 1.0) / eps, s / eps) -
               std::sqrt(2.0) * gamma_tilde * eps *
                   Phi2(1.0 + (z - 1.0) / (std::sqrt(2.0) * eps), s / (std::sqrt(2.0) * eps));
    };

    EnvelopeReport rep;
    rep.eps = eps;
    rep.sup_u = u_eps.values.cwiseAbs().maxCoeff();
    // sample windows: the scaled arguments must stay inside the model mesh and
    // the channel samples must stay where the global eigenvector carries
    // signal (the field decays like exp(-sqrt(lambda1)(1-z)/eps))
    rep.r0 = std::min(0.5, 0.8 * md.R * eps);
    rep.tube_x1_min = std::max({0.5 + 1e-3, 1.0 - 0.95 * (md.L_tube + 1.0) * eps,
                                1.0 - 8.0 * eps / g});

    double C3 = 0.0, C5 = 1e300, c_lower = 1e300;
    // junction half-ball samples
    for (int ia = 1; ia < 12; ++ia)
        for (int ir = 1; ir <= 10; ++ir) {
            const double alpha = 0.5 * PI * ia / 12.0;
            const double rho = rep.r0 * ir / 10.0;
            if (rho < 2.0 * eps) continue;
            const double z = 1.0 + rho * std::cos(alpha), s = rho * std::sin(alpha);
            const double uv = dumbbell.interpolate(u_eps.values, z, s);
            const double up = upper(z, s), lo = lower(z, s);
            if (up > 1e-14) C3 = std::max(C3, std::abs(uv) / up);
            else if (std::abs(uv) > 1e-12) ++rep.violations;
            if (lo > 1e-14) C5 = std::min(C5, uv / lo);
            if (z - 1.0 > 1e-6) c_lower = std::min(c_lower, uv / (z - 1.0));
        }
    // corridor samples
    for (int iz = 0; iz <= 20; ++iz)
        for (int is = 0; is < 6; ++is) {
            const double z = rep.tube_x1_min + (1.0 - rep.tube_x1_min) * iz / 20.0;
            const double s = eps * (0.05 + 0.85 * is / 6.0);
            const double uv = dumbbell.interpolate(u_eps.values, z, s);
            const double up = upper(z, s), lo = lower(z, s);
            if (up > 1e-14) C3 = std::max(C3, std::abs(uv) / up);
            else if (std::abs(uv) > 1e-12) ++rep.violations;
            if (lo > 1e-14) C5 = std::min(C5, uv / lo);
        }
    rep.C3 = C3;
    rep.C5 = (C5 == 1e300) ? 0.0 : C5;
    rep.c_lower = (c_lower == 1e300) ? 0.0 : c_lower;
    return rep;
}

double fit_farfield_constant(const DiscreteField& phi, const ModelDomainMesh& md,
                             double t, bool subtract_linear)
{
    const MeridianMesh& m = md.mesh;
    double c = 0.0;
    for (int i = 1; i <= 24; ++i) {
        const double alpha = 0.5 * PI * i / 26.0;  // stay away from the flat face
        const double z = 1.0 + t * std::cos(alpha), s = t * std::sin(alpha);
        const double x1m1 = z - 1.0;
        if (x1m1 < 0.1 * t) continue;
        double v = m.interpolate(phi.values, z, s);
        if (subtract_linear) v -= x1m1;
        c = std::max(c, std::abs(v) * std::pow(t, m.N) / x1m1);
    }
    return c;
}

} // namespace dumbbell
