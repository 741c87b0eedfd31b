// Almgren-type frequency quotients of the dumbbell eigenfield (left regime,
// corridor, right regime), model quotients for harmonic fields in tubes and
// exteriors, Pohozaev and derivative-formula residuals, the coercivity ratio
// and the optimal boundary Poincare constant.
#ifndef DUMBBELL_FREQUENCY_HPP
#define DUMBBELL_FREQUENCY_HPP

#include "dumbbell/eigensolver.hpp"
#include "dumbbell/harmonic_profiles.hpp"

namespace dumbbell {

enum class FreqRegime { left, corridor, right, tube_model, exterior_model };

const char* to_string(FreqRegime r);

struct FreqSample {
    double r = 0.0;
    double D = 0.0;   // scaled Dirichlet-type numerator, as in the defining formula
    double H = 0.0;   // scaled boundary mass
    double N = 0.0;   // the quotient
    FreqRegime regime = FreqRegime::left;
    bool dropped = false;  // H under 1e-14 of the profile maximum
};

struct FrequencyProfile {
    double eps = 0.0;
    std::string field_id;
    std::vector<FreqSample> samples;
};

// Quotient of the eigenfield u on the eps-dumbbell. Valid sample points lie
// in (-R_left, -eps) u [0,1] u (1+eps, 1+R_right); the excluded bands throw.
FrequencyProfile frequency_dumbbell(const DiscreteField& u, const PWeight& p,
                                    double lambda, double eps,
                                    const std::vector<double>& r_samples,
                                    int quad_order = 48);

// N_phi(r) = int_{tube, x1<r} |grad phi|^2 / int_{slice r} phi^2
FrequencyProfile frequency_tube_model(const DiscreteField& phi,
                                      const std::vector<double>& r_samples,
                                      int quad_order = 48);
FrequencyProfile frequency_tube_model(const FieldExpr& phi, const MeridianMesh& mesh,
                                      const std::vector<double>& r_samples,
                                      int quad_order = 48);

// N^-(t) = t int_{exterior of B_t} |grad phi|^2 / int_{half sphere t} phi^2.
// The expression overload uses the Green identity on the sphere (no domain
// truncation); the field overload integrates the meshed exterior. For fields
// living on the model mesh (right block as the reflected D^-), pass
// right_center = true.
FrequencyProfile frequency_exterior_model(const FieldExpr& phi, const MeridianMesh& mesh,
                                          const std::vector<double>& t_samples,
                                          int quad_order = 48);
FrequencyProfile frequency_exterior_model(const DiscreteField& phi, bool right_center,
                                          const std::vector<double>& t_samples,
                                          int quad_order = 48);

struct PoincareResult {
    double constant = 0.0;      // smallest Rayleigh quotient (optimal constant)
    double trial_quotient = 0.0;  // quotient of the explicit trial x1/|x|^N
    double correlation = 0.0;   // trace correlation of minimizer and trial
};

PoincareResult poincare_optimal_constant(int N, double R_out = 8.0, int n_alpha = 24,
                                         double rel_step = 0.1, double h_far = 0.5,
                                         double tol = 1e-9);

enum class PohozaevSite { left, right, corridor };

// |LHS - RHS| of the selected identity, normalized by the larger side.
double pohozaev_residual(const DiscreteField& u, const PWeight& p, double lambda,
                         double eps, PohozaevSite site, double t, int quad_order = 48);

struct DerivativeSample {
    double r = 0.0;
    double numeric = 0.0;    // central difference of the quotient
    double closed = 0.0;     // the derivative formula
    double R_eps = 0.0;      // remainder term (right regime only)
};

std::vector<DerivativeSample> derivative_residual(const DiscreteField& u, const PWeight& p,
                                                  double lambda, double eps,
                                                  FreqRegime regime,
                                                  const std::vector<double>& r_samples,
                                                  int quad_order = 48);

// (D-form over Omega_r^eps) / (half the Dirichlet energy); >= 1 when coercive
double coercivity_ratio(const DiscreteField& u, const PWeight& p, double lambda,
                        double eps, double r);

} // namespace dumbbell

#endif
