// Spectral data of the channel cross-section (unit ball of R^{N-1}) and of
// the half-sphere angular problem: lambda_1(Sigma), psi_1, Y_1, Upsilon_N.
#ifndef DUMBBELL_CROSS_SECTION_HPP
#define DUMBBELL_CROSS_SECTION_HPP

#include <functional>
#include <vector>

namespace dumbbell {

struct CrossSectionSpectrum {
    int N = 3;                    // ambient dimension (cross-section lives in R^{N-1})
    double lambda1 = 0.0;         // first Dirichlet eigenvalue of Sigma
    std::vector<double> grid;     // radial nodes s in [0,1]
    std::vector<double> psi;      // nodal values of psi_1, L^2(Sigma)-normalized, positive

    // linear interpolation of the radial profile
    double psi1(double s) const;
    double sqrt_lambda1() const;
};

// Radial P1 solve of -(s^{N-2} psi')' = lambda s^{N-2} psi on (0,1),
// psi(1)=0, natural at the axis. `resolution` is the cell count.
// Conforming Rayleigh-Ritz, so lambda1 decreases monotonically under
// nested refinement toward the Richardson-extrapolated value.
CrossSectionSpectrum solve_cross_section(int N, int resolution);

// Richardson extrapolation of lambda1 from resolutions n and 2n.
double cross_section_lambda1_extrapolated(int N, int resolution);

struct AngularProfile {
    int N = 3;
    double upsilonN = 0.0;        // sqrt( int_{S^{N-1}_-} theta_1^2 dsigma )
    // Y_1 on the lower half-sphere as a function of theta_1 = cos(alpha) < 0.
    double Y1(double theta1) const { return -theta1 / upsilonN; }
};

AngularProfile angular_profile(int N, int quad_order);

// Rayleigh quotient of Y_1 for the Laplace-Beltrami operator on the lower
// half-sphere with Dirichlet equator; equals N-1 up to quadrature error.
double y1_eigenvalue_check(int N, int quad_order = 64);

// int_{S^{N-1}_-} Y_1^2 dsigma, by quadrature (equals 1 by construction).
double y1_norm_check(int N, int quad_order = 64);

// Gauss-Legendre nodes/weights on [a,b].
void gauss_legendre(int n, double a, double b,
                    std::vector<double>& x, std::vector<double>& w);

} // namespace dumbbell

#endif
