// Junction profiles on the half-space-plus-tube model domain: Phi_1 (linear
// growth at +infinity), Phi_2 (tube-exponential growth), the explicit fields
// f and h, Kelvin-transform utilities, and the sub/super-solution envelope
// checks for computed eigenfields.
#ifndef DUMBBELL_HARMONIC_PROFILES_HPP
#define DUMBBELL_HARMONIC_PROFILES_HPP

#include "dumbbell/cross_section.hpp"
#include "dumbbell/operators.hpp"

namespace dumbbell {

using ModelDomainMesh = ModelMeshData;

struct ProfilePair {
    const ModelDomainMesh* domain = nullptr;
    DiscreteField phi1;
    DiscreteField phi2;
};

// f(x1,x') = exp(-sqrt(lambda1)(x1-1)) psi_1(|x'|), harmonic in the tube
FieldExpr eval_f(const CrossSectionSpectrum& cs);
// h(x1,x') = f(1-x1,x')
FieldExpr eval_h(const CrossSectionSpectrum& cs);

// Phi_1 = w + (x1-1)^+ where w minimizes the flux functional with unit
// density on the junction disk Sigma.
DiscreteField compute_phi1(const ModelDomainMesh& md);

// Phi_2 = w + f inside the tube cylinder, w outside; w carries minus the
// lateral flux of f on the extended tube wall {x1>1, |x'|=1}.
DiscreteField compute_phi2(const ModelDomainMesh& md, const CrossSectionSpectrum& cs);

ProfilePair compute_profiles(const ModelDomainMesh& md, const CrossSectionSpectrum& cs);

// Kelvin transform about a center on the axis, unit radius:
// v~(x) = |x-c|^{2-N} v(c + (x-c)/|x-c|^2), with the exact chain-rule gradient.
FieldExpr kelvin(const FieldExpr& v, const Eigen::Vector2d& center, int N);

struct EnvelopeReport {
    double eps = 0.0;
    double C3 = 0.0;        // smallest constant with |u| <= C3 Phi^eps on samples
    double C5 = 0.0;        // largest constant with u >= C5 Phi~^eps on samples
    double c_lower = 0.0;   // largest c with u >= c (x1-1) on B_r0^+ \ B_2eps^+
    double sup_u = 0.0;     // L^infty bound of the eigenfield (Brezis-Kato analogue)
    double r0 = 0.0;        // sampled junction ball radius
    double tube_x1_min = 0.0;
    int violations = 0;     // samples where the fitted inequalities fail
};

// Fits the envelope constants of the eigenfield u_eps against the rescaled
// profiles. Sample windows stay inside the model mesh; violations are data.
EnvelopeReport check_envelopes(const DiscreteField& u_eps, const ProfilePair& profiles,
                               double eps, const CrossSectionSpectrum& cs);

// max over half-sphere samples at |x-e1| = t of |phi - asym|/((x1-1)/|x-e1|^N)
double fit_farfield_constant(const DiscreteField& phi, const ModelDomainMesh& md,
                             double t, bool subtract_linear);

} // namespace dumbbell

#endif
