#include "dumbbell/weight_model.hpp"

#include <cmath>

namespace dumbbell {

namespace {

// b(x) = A exp(1 - 1/(1-q)) with q = |x-c|^2 / rho^2 < 1
double bump_val(const Bump& b, double r2)
{
    const double q = r2 / (b.radius * b.radius);
    if (q >= 1.0) return 0.0;
    return b.amplitude * std::exp(1.0 - 1.0 / (1.0 - q));
}

// db/dq = -b / (1-q)^2;  grad b = db/dq * 2 (x - c) / rho^2
double bump_dq(const Bump& b, double r2)
{
    const double q = r2 / (b.radius * b.radius);
    if (q >= 1.0) return 0.0;
    const double v = b.amplitude * std::exp(1.0 - 1.0 / (1.0 - q));
    return -v / ((1.0 - q) * (1.0 - q));
}

} // namespace

double PWeight::eval(double z, double s) const
{
    double p = 0.0;
    for (const auto& b : bumps) {
        const double dz = z - b.center;
        p += bump_val(b, dz * dz + s * s);
    }
    return p;
}

Eigen::Vector2d PWeight::grad(double z, double s) const
{
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    for (const auto& b : bumps) {
        const double dz = z - b.center;
        const double r2 = dz * dz + s * s;
        const double dq = bump_dq(b, r2);
        if (dq == 0.0) continue;
        const double f = 2.0 * dq / (b.radius * b.radius);
        g.x() += f * dz;
        g.y() += f * s;
    }
    return g;
}

double PWeight::radial_term(double z, double s) const
{
    const Eigen::Vector2d g = grad(z, s);
    return z * g.x() + s * g.y();
}

double PWeight::axial_term(double z, double s) const { return grad(z, s).x(); }

std::vector<std::string> PWeight::validate() const
{
    std::vector<std::string> out;
    for (size_t i = 0; i < bumps.size(); ++i) {
        const auto& b = bumps[i];
        const std::string id = "bump " + std::to_string(i);
        if (b.amplitude <= 0.0) out.push_back(id + ": amplitude must be positive");
        if (b.radius <= 0.0) out.push_back(id + ": radius must be positive");
        // strip {1/2 <= x1 <= 1, |x'| < 1}: the support reaches s = 0 at every
        // covered x1, so overlap happens iff the x1-intervals meet
        if (b.center + b.radius > 0.5 && b.center - b.radius < 1.0)
            out.push_back(id + ": support intersects the strip {1/2 <= x1 <= 1}");
        // B_3^+ = {x1 > 1} cap B(e1, 3)
        if (b.center + b.radius > 1.0 && std::abs(b.center - 1.0) < b.radius + 3.0)
            out.push_back(id + ": support intersects B_3^+");
        if (b.center > 1.0 && b.center - b.radius <= 4.0)
            out.push_back(id + ": D+ bump must satisfy c - rho > 4");
        if (b.center < 0.0 && b.center + b.radius >= 0.0)
            out.push_back(id + ": D- bump support must stay inside D-");
    }
    return out;
}

PWeight PWeight::default_model()
{
    PWeight p;
    p.bumps.push_back({6.0, 1.5, 30.0});
    p.bumps.push_back({-4.0, 1.5, 10.0});
    return p;
}

} // namespace dumbbell
