#include "dumbbell/blowup.hpp"
#include "dumbbell/constants.hpp"

#include <cmath>
#include <stdexcept>

namespace dumbbell {

double RescaledField::eval(double z, double s) const
{
    switch (kind) {
        case RescaleKind::right_tilde:
            return src->eval(1.0 + eps * (z - 1.0), eps * s) / normalization;
        case RescaleKind::left_hat:
            return src->eval(eps * z, eps * s) / normalization;
        case RescaleKind::U_normalized:
            return src->eval(z, s) / normalization;
        case RescaleKind::U_lambda:
            return src->eval(lambda * z, lambda * s) / normalization;
    }
    return 0.0;
}

ScalarField RescaledField::as_scalar() const
{
    const RescaledField self = *this;
    return [self](double z, double s) { return self.eval(z, s); };
}

RescaledField rescale(const DiscreteField& u, double eps, RescaleKind kind,
                      double k_tilde, double lambda, int quad_order)
{
    const MeridianMesh& mesh = *u.mesh;
    const int N = mesh.N;
    RescaledField rf;
    rf.kind = kind;
    rf.eps = eps;
    rf.src = &u;
    rf.lambda = lambda;
    const auto u2_on = [&](CurveKind ck, double v) {
        const auto c = curve(mesh, ck, v, quad_order);
        return surface_integral(c, [&](double z, double s) {
            const double uv = u.eval(z, s);
            return uv * uv;
        });
    };
    switch (kind) {
        case RescaleKind::right_tilde:
            rf.normalization = eps;
            break;
        case RescaleKind::left_hat: {
            const double Hc = u2_on(CurveKind::slice, eps);
            rf.normalization = std::sqrt(std::pow(eps, 1 - N) * Hc);
            if (!(rf.normalization > 0.0))
                throw std::runtime_error("rescale: vanishing normalization integral");
            break;
        }
        case RescaleKind::U_normalized: {
            const double H = u2_on(CurveKind::half_sphere_left, k_tilde);
            rf.normalization = std::sqrt(H);
            if (!(rf.normalization > 0.0))
                throw std::runtime_error("rescale: vanishing normalization integral");
            break;
        }
        case RescaleKind::U_lambda: {
            const double H = u2_on(CurveKind::half_sphere_left, lambda) / std::pow(lambda, N - 1);
            rf.normalization = std::sqrt(H);
            if (!(rf.normalization > 0.0))
                throw std::runtime_error("rescale: vanishing normalization integral");
            break;
        }
    }
    return rf;
}

std::vector<std::pair<double, double>> H_U(const MeridianMesh& mesh, const ScalarField& U,
                                           const std::vector<double>& lambdas, int quad_order)
{
    std::vector<std::pair<double, double>> out;
    for (double lam : lambdas) {
        const auto c = curve(mesh, CurveKind::half_sphere_left, lam, quad_order);
        const double h = surface_integral(c, [&](double z, double s) {
                             const double v = U(z, s);
                             return v * v;
                         }) /
                         std::pow(lam, mesh.N - 1);
        out.emplace_back(lam, h);
    }
    return out;
}

std::vector<std::pair<double, double>> mu_projection(int N, const ScalarField& U,
                                                     const AngularProfile& ap,
                                                     const std::vector<double>& lambdas,
                                                     int quad_order)
{
    std::vector<double> gx, gw;
    gauss_legendre(quad_order, 0.5 * PI, PI, gx, gw);
    std::vector<std::pair<double, double>> out;
    for (double lam : lambdas) {
        double mu = 0.0;
        for (int q = 0; q < quad_order; ++q) {
            const double th1 = std::cos(gx[q]);
            const double v = U(lam * th1, lam * std::sin(gx[q]));
            mu += gw[q] * omega_meridian(N) * std::pow(std::sin(gx[q]), N - 2) * v * ap.Y1(th1);
        }
        out.emplace_back(lam, mu);
    }
    return out;
}

FitResult fit_power(const std::vector<std::pair<double, double>>& samples)
{
    if (samples.size() < 2) throw std::invalid_argument("fit_power: need at least two samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    FitResult fr;
    fr.lambda_min = 1e300;
    fr.lambda_max = -1e300;
    const double n = static_cast<double>(samples.size());
    for (const auto& [lam, v] : samples) {
        if (!(v > 0.0)) throw std::invalid_argument("fit_power: nonpositive sample");
        const double x = std::log(lam), y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        fr.lambda_min = std::min(fr.lambda_min, lam);
        fr.lambda_max = std::max(fr.lambda_max, lam);
    }
    const double denom = n * sxx - sx * sx;
    fr.exponent = denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
    const double intercept = (sy - fr.exponent * sx) / n;
    fr.coefficient = std::exp(intercept);
    double rss = 0.0;
    for (const auto& [lam, v] : samples) {
        const double e = std::log(v) - (intercept + fr.exponent * std::log(lam));
        rss += e * e;
    }
    fr.rms_residual = std::sqrt(rss / n);
    return fr;
}

BetaEstimate beta_from_fit(const MeridianMesh& mesh, const ScalarField& U,
                           const AngularProfile& ap, const std::vector<double>& window,
                           int quad_order)
{
    const int N = mesh.N;
    BetaEstimate be;
    const auto hs = H_U(mesh, U, window, quad_order);
    be.h_fit = fit_power(hs);

    // magnitude: slope-constrained intercept of lambda^{2(N-1)} H_U
    double logC = 0.0;
    for (const auto& [lam, h] : hs) logC += std::log(h) + 2.0 * (N - 1) * std::log(lam);
    logC /= static_cast<double>(hs.size());
    const double mag = std::sqrt(std::exp(logC)) / ap.upsilonN;

    // trace sign at the smallest window radius
    const double lam0 = be.h_fit.lambda_min;
    const auto c = curve(mesh, CurveKind::half_sphere_left, lam0, quad_order);
    const double trace_mean = surface_integral(c, U);
    be.beta_fit = trace_mean > 0.0 ? -mag : mag;

    const auto mus = mu_projection(N, U, ap, window, quad_order);
    double bmu = 0.0;
    for (const auto& [lam, m] : mus) bmu += -std::pow(lam, N - 1) * m / ap.upsilonN;
    be.beta_mu = bmu / static_cast<double>(mus.size());

    if (be.beta_fit * be.beta_mu < 0.0)
        throw std::runtime_error("beta_from_fit: trace sign and mu sign disagree");
    return be;
}

double beta_from_formula(const MeridianMesh& mesh, const ScalarField& U, const PWeight& p,
                         double lambda_k0, const AngularProfile& ap, int quad_order)
{
    const int N = mesh.N;
    const auto mu1 = mu_projection(N, U, ap, {1.0}, quad_order);

    // volume term: p U Y_1(x/|x|) (|x| chi_{B_1^-} + chi_{Omega_-1} |x|^{1-N})
    const auto vol = region_integral(
        mesh, [](double z, double) { return z < 0.0; },
        [&](double z, double s) {
            const double pv = p.eval(z, s);
            if (pv == 0.0) return 0.0;
            const double rho = std::sqrt(z * z + s * s);
            const double y1 = ap.Y1(z / rho);
            const double radial = rho < 1.0 ? rho : std::pow(rho, 1 - N);
            return pv * U(z, s) * y1 * radial;
        });
    return -(mu1[0].second - lambda_k0 / N * vol.value) / ap.upsilonN;
}

MuExpansion mu_expansion_check(const MeridianMesh& mesh, const ScalarField& U,
                               const PWeight& p, double lambda_k0, const AngularProfile& ap,
                               const std::vector<double>& lambdas, int quad_order)
{
    const int N = mesh.N;
    MuExpansion me;
    me.bracket = -beta_from_formula(mesh, U, p, lambda_k0, ap, quad_order) * ap.upsilonN;
    const auto mus = mu_projection(N, U, ap, lambdas, quad_order);
    std::vector<std::pair<double, double>> devs;
    for (const auto& [lam, m] : mus) {
        const double dev = std::abs(std::pow(lam, N - 1) * m - me.bracket);
        me.deviation.emplace_back(lam, dev);
        if (dev > 0.0) devs.emplace_back(lam, dev);
    }
    me.correction_exponent = devs.size() >= 2 ? fit_power(devs).exponent : 0.0;
    return me;
}

NodalScan nodal_sign_scan(const DiscreteField& u, const std::vector<double>& r_values,
                          bool right_side, int quad_order)
{
    const MeridianMesh& mesh = *u.mesh;
    NodalScan out;
    for (double r : r_values) {
        const auto c = curve(mesh,
                             right_side ? CurveKind::half_sphere_right : CurveKind::half_sphere_left,
                             r, quad_order);
        double mn = 1e300;
        for (const auto& n : c.nodes) mn = std::min(mn, u.eval(n.pos.x(), n.pos.y()));
        out.min_on_sphere.emplace_back(r, mn);
        if (mn <= 0.0) out.all_positive = false;
    }
    return out;
}

CompareResult compare_fields(const ScalarField& a, const ScalarField& b,
                             const std::vector<Eigen::Vector2d>& pts,
                             const std::vector<double>& wts)
{
    double sab = 0.0, sbb = 0.0;
    std::vector<double> av(pts.size()), bv(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        av[i] = a(pts[i].x(), pts[i].y());
        bv[i] = b(pts[i].x(), pts[i].y());
        sab += wts[i] * av[i] * bv[i];
        sbb += wts[i] * bv[i] * bv[i];
    }
    if (sbb == 0.0) throw std::invalid_argument("compare_fields: reference vanishes on the region");
    CompareResult cr;
    cr.c = sab / sbb;
    double num = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        const double d = av[i] - cr.c * bv[i];
        num += wts[i] * d * d;
    }
    cr.rel_residual = std::sqrt(num / (cr.c * cr.c * sbb));
    return cr;
}

CompareResult compare_blowup_to_profile(const RescaledField& resc, const DiscreteField& profile)
{
    const int N = resc.src->mesh->N;
    std::vector<Eigen::Vector2d> pts;
    std::vector<double> wts;
    const bool tilde = resc.kind == RescaleKind::right_tilde;
    if (!tilde && resc.kind != RescaleKind::left_hat)
        throw std::invalid_argument("compare_blowup_to_profile: pass a junction rescaling");

    // tube slab in rescaled coordinates
    const double z0 = tilde ? -2.0 : 0.5, z1 = tilde ? 0.9 : 3.0;
    for (int iz = 0; iz <= 28; ++iz)
        for (int is = 0; is < 10; ++is) {
            const double z = z0 + (z1 - z0) * iz / 28.0;
            const double s = 0.05 + 0.88 * is / 10.0;
            pts.emplace_back(z, s);
            wts.push_back(std::pow(s, N - 2));
        }
    // near-junction half annulus
    for (int ia = 1; ia < 10; ++ia)
        for (int ir = 0; ir <= 8; ++ir) {
            const double alpha = 0.5 * PI * ia / 10.0;
            const double rho = 1.2 + 1.6 * ir / 8.0;
            const double dz = rho * std::cos(alpha), s = rho * std::sin(alpha);
            pts.emplace_back(tilde ? 1.0 + dz : -dz, s);
            wts.push_back(std::pow(s, N - 2));
        }

    const auto a = resc.as_scalar();
    const auto b = [&](double z, double s) {
        // left_hat compares against x -> phi2(1 - x1, x')
        return tilde ? profile.eval(z, s) : profile.eval(1.0 - z, s);
    };
    return compare_fields(a, b, pts, wts);
}

double hat_gamma_ratio(const DiscreteField& u, double eps, double R, int quad_order)
{
    const MeridianMesh& mesh = *u.mesh;
    const auto u2_on_slice = [&](double r) {
        const auto c = curve(mesh, CurveKind::slice, r, quad_order);
        return surface_integral(c, [&](double z, double s) {
            const double uv = u.eval(z, s);
            return uv * uv;
        });
    };
    return u2_on_slice(R * eps) / u2_on_slice(eps);
}

} // namespace dumbbell
