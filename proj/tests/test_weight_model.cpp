#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dumbbell/weight_model.hpp"

#include <cmath>
#include <random>

using namespace dumbbell;

TEST_CASE("bump value at its center is the amplitude")
{
    const auto p = PWeight::default_model();
    CHECK(p.eval(6.0, 0.0) == doctest::Approx(30.0).epsilon(1e-14));
    CHECK(p.eval(-4.0, 0.0) == doctest::Approx(10.0).epsilon(1e-14));
}

TEST_CASE("p vanishes on the protected strip")
{
    const auto p = PWeight::default_model();
    CHECK(p.eval(0.75, 0.0) == 0.0);
    CHECK(p.eval(0.5, 0.5) == 0.0);
    CHECK(p.eval(2.0, 0.0) == 0.0);  // inside B_3^+
}

TEST_CASE("closed-form gradient matches central finite differences")
{
    const auto p = PWeight::default_model();
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(-0.8, 0.8);
    const double h = 1e-6;
    for (int i = 0; i < 20; ++i) {
        // sample inside a bump, away from the support edge
        const bool plus = i % 2 == 0;
        const double c = plus ? 6.0 : -4.0;
        const double z = c + U(rng), s = std::abs(U(rng));
        if (p.eval(z, s) < 1e-6) continue;
        const Eigen::Vector2d g = p.grad(z, s);
        const double gz = (p.eval(z + h, s) - p.eval(z - h, s)) / (2 * h);
        const double gs = (p.eval(z, s + h) - p.eval(z, s - h)) / (2 * h);
        const double scale = std::max(1.0, g.norm());
        CHECK(std::abs(g.x() - gz) / scale < 1e-6);
        CHECK(std::abs(g.y() - gs) / scale < 1e-6);
    }
}

TEST_CASE("radial and axial terms are consistent with the gradient")
{
    const auto p = PWeight::default_model();
    const double z = 5.5, s = 0.4;
    const Eigen::Vector2d g = p.grad(z, s);
    CHECK(p.radial_term(z, s) == doctest::Approx(z * g.x() + s * g.y()));
    CHECK(p.axial_term(z, s) == doctest::Approx(g.x()));
}

TEST_CASE("default model validates clean")
{
    CHECK(PWeight::default_model().validate().empty());
}

TEST_CASE("violations are detected")
{
    PWeight bad;
    bad.bumps.push_back({2.0, 1.0, 5.0});  // intersects B_3^+
    CHECK(!bad.validate().empty());

    PWeight zero_amp;
    zero_amp.bumps.push_back({6.0, 1.5, 0.0});
    CHECK(!zero_amp.validate().empty());

    PWeight strip;
    strip.bumps.push_back({0.0, 1.0, 1.0});  // touches the strip and D-
    CHECK(!strip.validate().empty());
}

TEST_CASE("p is nonnegative and axisymmetric by construction")
{
    const auto p = PWeight::default_model();
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(-8.0, 8.0);
    for (int i = 0; i < 200; ++i) {
        const double z = U(rng), s = std::abs(U(rng));
        CHECK(p.eval(z, s) >= 0.0);
    }
}
