// Concrete weight p: a sum of smooth compactly supported bumps centered on
// the symmetry axis, with closed-form gradient so x.grad(p) and dp/dx1 are
// exact. Supports must avoid the strip {1/2 <= x1 <= 1, |x'| < 1} and B_3^+.
#ifndef DUMBBELL_WEIGHT_MODEL_HPP
#define DUMBBELL_WEIGHT_MODEL_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace dumbbell {

struct Bump {
    double center = 0.0;     // on the x1-axis
    double radius = 1.0;
    double amplitude = 1.0;  // b(c) = A
};

struct PWeight {
    std::vector<Bump> bumps;

    double eval(double z, double s) const;
    Eigen::Vector2d grad(double z, double s) const;   // (dp/dz, dp/ds)
    double radial_term(double z, double s) const;     // x . grad p
    double axial_term(double z, double s) const;      // dp/dx1

    // empty iff the support constraints and positivity hold
    std::vector<std::string> validate() const;

    // D+ bump at 6 (rho 1.5, A 30), D- bump at -4 (rho 1.5, A 10); amplitudes
    // tuned so the spectral gap check in the eigensolver passes with margin.
    static PWeight default_model();
};

} // namespace dumbbell

#endif
