// Sphere measures and angular data shared by all modules.
#ifndef DUMBBELL_CONSTANTS_HPP
#define DUMBBELL_CONSTANTS_HPP

#include <cmath>

namespace dumbbell {

inline constexpr double PI = 3.14159265358979323846;

// |S^n|, the surface measure of the unit n-sphere embedded in R^{n+1}.
inline double sphere_area(int n)
{
    return 2.0 * std::pow(PI, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
}

// omega_{N-1} in dimension N: measure of S^{N-1}.
inline double omega_ambient(int N) { return sphere_area(N - 1); }

// omega_{N-2}: measure of S^{N-2}, the weight carried by the meridian
// reduction (volume element dx = omega_{N-2} s^{N-2} ds dz).
inline double omega_meridian(int N) { return sphere_area(N - 2); }

} // namespace dumbbell

#endif
