#include "dumbbell/cross_section.hpp"
#include "dumbbell/constants.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dumbbell {

void gauss_legendre(int n, double a, double b,
                    std::vector<double>& x, std::vector<double>& w)
{
    // Newton iteration on Legendre polynomials, nodes mapped to [a,b].
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        const double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
        x[i] = xm - xl * z;
        x[n - 1 - i] = xm + xl * z;
        w[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

double CrossSectionSpectrum::psi1(double s) const
{
    if (s <= grid.front()) return psi.front();
    if (s >= grid.back()) return psi.back();
    auto it = std::upper_bound(grid.begin(), grid.end(), s);
    size_t i = static_cast<size_t>(it - grid.begin());
    double t = (s - grid[i - 1]) / (grid[i] - grid[i - 1]);
    return (1.0 - t) * psi[i - 1] + t * psi[i];
}

double CrossSectionSpectrum::sqrt_lambda1() const { return std::sqrt(lambda1); }

namespace {

// Tridiagonal LDL^T solve, A given by (diag, off).
void tridiag_solve(const std::vector<double>& diag, const std::vector<double>& off,
                   std::vector<double>& rhs)
{
    const size_t n = diag.size();
    std::vector<double> d(n), l(n - 1);
    d[0] = diag[0];
    for (size_t i = 1; i < n; ++i) {
        l[i - 1] = off[i - 1] / d[i - 1];
        d[i] = diag[i] - l[i - 1] * off[i - 1];
    }
    for (size_t i = 1; i < n; ++i) rhs[i] -= l[i - 1] * rhs[i - 1];
    for (size_t i = 0; i < n; ++i) rhs[i] /= d[i];
    for (size_t i = n - 1; i > 0; --i) rhs[i - 1] -= l[i - 1] * rhs[i];
}

} // namespace

CrossSectionSpectrum solve_cross_section(int N, int resolution)
{
    if (N < 3) throw std::invalid_argument("solve_cross_section: N >= 3 required");
    if (resolution < 16) throw std::invalid_argument("solve_cross_section: resolution >= 16 required");

    const int n = resolution;         // cells; nodes 0..n, Dirichlet at node n
    const double h = 1.0 / n;
    const int m = n;                  // free nodes 0..n-1

    // P1 stiffness/mass for the weighted form int s^{N-2} (psi' phi' , psi phi) ds,
    // assembled with 4-point Gauss per cell (exact for the polynomial weight).
    std::vector<double> Kd(m, 0.0), Ko(m - 1, 0.0), Md(m, 0.0), Mo(m - 1, 0.0);
    std::vector<double> gx, gw;
    gauss_legendre(4, 0.0, 1.0, gx, gw);
    for (int c = 0; c < n; ++c) {
        const double s0 = c * h, s1 = (c + 1) * h;
        double k00 = 0, k01 = 0, k11 = 0, m00 = 0, m01 = 0, m11 = 0;
        for (size_t q = 0; q < gx.size(); ++q) {
            const double s = s0 + gx[q] * (s1 - s0);
            const double wgt = gw[q] * (s1 - s0) * std::pow(s, N - 2);
            const double phi0 = (s1 - s) / h, phi1 = (s - s0) / h;
            k00 += wgt / (h * h);
            k01 -= wgt / (h * h);
            k11 += wgt / (h * h);
            m00 += wgt * phi0 * phi0;
            m01 += wgt * phi0 * phi1;
            m11 += wgt * phi1 * phi1;
        }
        if (c < m) Kd[c] += k00, Md[c] += m00;
        if (c + 1 < m) Kd[c + 1] += k11, Md[c + 1] += m11;
        if (c + 1 < m) Ko[c] += k01, Mo[c] += m01;
    }

    // Inverse iteration on the pencil (K, M): x <- K^{-1} M x.
    std::vector<double> x(m, 1.0), y(m);
    double lambda = 0.0, lambda_prev = -1.0;
    for (int it = 0; it < 200; ++it) {
        // y = M x
        for (int i = 0; i < m; ++i) {
            y[i] = Md[i] * x[i];
            if (i > 0) y[i] += Mo[i - 1] * x[i - 1];
            if (i + 1 < m) y[i] += Mo[i] * x[i + 1];
        }
        tridiag_solve(Kd, Ko, y);
        // Rayleigh quotient lambda = (x K x)/(x M x) with x = y normalized
        double nrm = 0.0;
        for (double v : y) nrm = std::max(nrm, std::abs(v));
        for (double& v : y) v /= nrm;
        x = y;
        double xKx = 0.0, xMx = 0.0;
        for (int i = 0; i < m; ++i) {
            xKx += Kd[i] * x[i] * x[i];
            xMx += Md[i] * x[i] * x[i];
            if (i + 1 < m) {
                xKx += 2.0 * Ko[i] * x[i] * x[i + 1];
                xMx += 2.0 * Mo[i] * x[i] * x[i + 1];
            }
        }
        lambda = xKx / xMx;
        if (std::abs(lambda - lambda_prev) < 1e-12 * lambda && it > 3) break;
        lambda_prev = lambda;
        if (it == 199) throw std::runtime_error("solve_cross_section: eigensolve did not converge");
    }

    CrossSectionSpectrum out;
    out.N = N;
    out.lambda1 = lambda;
    out.grid.resize(n + 1);
    out.psi.resize(n + 1);
    for (int i = 0; i <= n; ++i) out.grid[i] = i * h;
    // positive sign and L^2(Sigma) normalization: omega_{N-2} int psi^2 s^{N-2} ds = 1
    double sgn = 0.0;
    for (double v : x) sgn += v;
    const double flip = (sgn < 0) ? -1.0 : 1.0;
    for (int i = 0; i < m; ++i) out.psi[i] = flip * x[i];
    out.psi[n] = 0.0;
    double nrm2 = 0.0;
    for (int c = 0; c < n; ++c) {
        const double s0 = c * h, s1 = (c + 1) * h;
        for (size_t q = 0; q < gx.size(); ++q) {
            const double s = s0 + gx[q] * (s1 - s0);
            const double wgt = gw[q] * (s1 - s0) * std::pow(s, N - 2);
            const double v = out.psi[c] * (s1 - s) / h + out.psi[c + 1] * (s - s0) / h;
            nrm2 += wgt * v * v;
        }
    }
    nrm2 *= omega_meridian(N);
    const double scale = 1.0 / std::sqrt(nrm2);
    for (double& v : out.psi) v *= scale;
    return out;
}

double cross_section_lambda1_extrapolated(int N, int resolution)
{
    const double l1 = solve_cross_section(N, resolution).lambda1;
    const double l2 = solve_cross_section(N, 2 * resolution).lambda1;
    return (4.0 * l2 - l1) / 3.0;
}

AngularProfile angular_profile(int N, int quad_order)
{
    if (N < 3) throw std::invalid_argument("angular_profile: N >= 3 required");
    // Upsilon_N^2 = int_{S-} theta_1^2 dsigma, theta_1 = cos(alpha), alpha in (pi/2, pi),
    // dsigma = omega_{N-2} sin^{N-2}(alpha) dalpha.
    std::vector<double> x, w;
    gauss_legendre(std::max(quad_order, 8), 0.5 * PI, PI, x, w);
    double up2 = 0.0;
    for (size_t q = 0; q < x.size(); ++q)
        up2 += w[q] * std::cos(x[q]) * std::cos(x[q]) * std::pow(std::sin(x[q]), N - 2);
    up2 *= omega_meridian(N);
    AngularProfile out;
    out.N = N;
    out.upsilonN = std::sqrt(up2);
    return out;
}

double y1_norm_check(int N, int quad_order)
{
    const AngularProfile ap = angular_profile(N, quad_order);
    std::vector<double> x, w;
    gauss_legendre(quad_order, 0.5 * PI, PI, x, w);
    double nrm = 0.0;
    for (size_t q = 0; q < x.size(); ++q) {
        const double y = ap.Y1(std::cos(x[q]));
        nrm += w[q] * y * y * std::pow(std::sin(x[q]), N - 2);
    }
    return nrm * omega_meridian(N);
}

double y1_eigenvalue_check(int N, int quad_order)
{
    // |grad_S theta_1|^2 = 1 - theta_1^2 on the sphere; quotient of quadratures.
    std::vector<double> x, w;
    gauss_legendre(quad_order, 0.5 * PI, PI, x, w);
    double num = 0.0, den = 0.0;
    for (size_t q = 0; q < x.size(); ++q) {
        const double c = std::cos(x[q]);
        const double wgt = w[q] * std::pow(std::sin(x[q]), N - 2);
        num += wgt * (1.0 - c * c);
        den += wgt * c * c;
    }
    return num / den;
}

} // namespace dumbbell
