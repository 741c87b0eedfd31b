// Rescalings of the eigenfield at the junctions, the normalized left-junction
// field U, its boundary mass H_U and Y_1-projection mu, power-law fits, the
// two independent computations of the singular coefficient beta, and the
// nodal sign scan. Scalar quantities accept any evaluator so the closed-form
// oracles run on exact expressions and the pipeline on interpolated fields.
#ifndef DUMBBELL_BLOWUP_HPP
#define DUMBBELL_BLOWUP_HPP

#include "dumbbell/frequency.hpp"

namespace dumbbell {

using ScalarField = std::function<double(double, double)>;

enum class RescaleKind { right_tilde, left_hat, U_normalized, U_lambda };

struct RescaledField {
    RescaleKind kind;
    double eps = 0.0;
    double normalization = 1.0;  // divisor applied to the source values
    double lambda = 1.0;         // dilation parameter for U_lambda
    const DiscreteField* src = nullptr;

    // evaluation in the rescaled coordinate frame
    double eval(double z, double s) const;
    ScalarField as_scalar() const;
};

// k_tilde is the left normalization radius of the U-field.
RescaledField rescale(const DiscreteField& u, double eps, RescaleKind kind,
                      double k_tilde = 0.25, double lambda = 1.0, int quad_order = 48);

// H_U(lambda) = lambda^{1-N} int_{Gamma_lambda^-} U^2 dsigma
std::vector<std::pair<double, double>> H_U(const MeridianMesh& mesh, const ScalarField& U,
                                           const std::vector<double>& lambdas,
                                           int quad_order = 48);

// mu(lambda) = int_{S^{N-1}_-} U(lambda theta) Y_1(theta) dsigma(theta)
std::vector<std::pair<double, double>> mu_projection(int N, const ScalarField& U,
                                                     const AngularProfile& ap,
                                                     const std::vector<double>& lambdas,
                                                     int quad_order = 48);

struct FitResult {
    double exponent = 0.0;
    double coefficient = 0.0;  // value at lambda = 1 of the fitted power law
    double rms_residual = 0.0; // in log space
    double lambda_min = 0.0, lambda_max = 0.0;
};

// least squares in log-log coordinates; throws on nonpositive samples
FitResult fit_power(const std::vector<std::pair<double, double>>& samples);

struct BetaEstimate {
    double beta_fit = 0.0;  // sign from the trace, magnitude from H_U
    double beta_mu = 0.0;   // from the Y_1 projection
    FitResult h_fit;
};

// Throws when the trace sign and the mu sign disagree.
BetaEstimate beta_from_fit(const MeridianMesh& mesh, const ScalarField& U,
                           const AngularProfile& ap, const std::vector<double>& window,
                           int quad_order = 48);

// The closed formula for beta from the limit equation data; the volume term
// is restricted to supp p, which the weight design keeps away from the origin.
double beta_from_formula(const MeridianMesh& mesh, const ScalarField& U, const PWeight& p,
                         double lambda_k0, const AngularProfile& ap, int quad_order = 48);

struct MuExpansion {
    std::vector<std::pair<double, double>> deviation;  // (lambda, |l^{N-1} mu - bracket|)
    double bracket = 0.0;
    double correction_exponent = 0.0;  // slope of the deviation in log-log
};

MuExpansion mu_expansion_check(const MeridianMesh& mesh, const ScalarField& U,
                               const PWeight& p, double lambda_k0, const AngularProfile& ap,
                               const std::vector<double>& lambdas, int quad_order = 48);

struct NodalScan {
    std::vector<std::pair<double, double>> min_on_sphere;  // (r, min u)
    bool all_positive = true;
};

NodalScan nodal_sign_scan(const DiscreteField& u, const std::vector<double>& r_values,
                          bool right_side = false, int quad_order = 64);

struct CompareResult {
    double c = 0.0;             // least-squares constant
    double rel_residual = 0.0;  // ||a - c b|| / ||c b|| over the region
};

// L^2 comparison over a tube slab plus a near-junction half annulus, in the
// rescaled coordinates of `resc`. For right_tilde the reference is phi1 on
// the model mesh; for left_hat it is x -> phi2(1-x1, x').
CompareResult compare_blowup_to_profile(const RescaledField& resc,
                                        const DiscreteField& profile);

// generic weighted comparison of two evaluators over the same sample set
CompareResult compare_fields(const ScalarField& a, const ScalarField& b,
                             const std::vector<Eigen::Vector2d>& pts,
                             const std::vector<double>& wts);

// int_{hat Gamma_R} u_hat^2 dsigma = H^c(R eps) / H^c(eps)
double hat_gamma_ratio(const DiscreteField& u, double eps, double R, int quad_order = 48);

} // namespace dumbbell

#endif
