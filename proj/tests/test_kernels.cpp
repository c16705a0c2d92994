#include "rwb/errors.hpp"
#include "rwb/kernels.hpp"

#include <doctest.h>

#include <cmath>

using namespace rwb;

TEST_CASE("reference kernel values")
{
    KernelParams p;
    p.b = 0.0;
    for (double g : {1e-3, 1.0, 50.0}) CHECK(sigma(p, g, true) == doctest::Approx(2.0));
    p.b = 1.0;
    CHECK(sigma(p, 2.0, true) == doctest::Approx(1.5));
    p.angular_mode = AngularMode::SharpCutoff;
    CHECK(sigma(p, 2.0, false) == 0.0);
}

TEST_CASE("kernel derivative")
{
    KernelParams p;
    p.b = 0.0;
    CHECK(dsigma_dg(p, 0.7, 1.0) == 0.0);
    p.b = 1.0;
    CHECK(dsigma_dg(p, 1.0, 1.0) == doctest::Approx(-1.0));
    for (double b : {0.5, 1.0, 2.9}) {
        p.b = b;
        for (double g : {1e-4, 0.3, 1.0, 7.0, 900.0}) {
            CHECK(dsigma_dg(p, g, 1.0) <= 0.0);
            const double h = 1e-6 * g;
            const double fd = (sigma(p, g + h, 1.0) - sigma(p, g - h, 1.0)) / (2 * h);
            CHECK(dsigma_dg(p, g, 1.0) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("cutoff weight")
{
    KernelParams p;
    p.B = 1.0;
    p.angular_mode = AngularMode::SharpCutoff;
    CHECK(cutoff_weight(p, 1.0) == 1.0);
    CHECK(cutoff_weight(p, 1.0 + 1e-12) == 0.0);

    p.angular_mode = AngularMode::SmoothCutoff;
    p.smooth_width = 0.2;
    CHECK(cutoff_weight(p, 0.8) == 1.0);
    CHECK(cutoff_weight(p, 0.9) == doctest::Approx(0.5));
    CHECK(cutoff_weight(p, 1.0) == 0.0);
    double prev = 1.0;
    for (double q = 0.8; q <= 1.0; q += 0.01) {
        const double w = cutoff_weight(p, q);
        CHECK(w <= prev);
        prev = w;
    }
}

TEST_CASE("cutoff solid angle")
{
    KernelParams p;
    p.angular_mode = AngularMode::SharpCutoff;
    p.B = 1.0;
    CHECK(cutoff_solid_angle(p, 0.0) == doctest::Approx(4 * M_PI));
    CHECK(cutoff_solid_angle(p, 0.5) == doctest::Approx(4 * M_PI));
    // kappa sin^2 <= B: two caps with cos >= sqrt(1 - B / kappa).
    const double kappa = 4.0;
    CHECK(cutoff_solid_angle(p, kappa) == doctest::Approx(4 * M_PI * (1 - std::sqrt(1 - 1.0 / kappa))));

    p.angular_mode = AngularMode::SmoothCutoff;
    p.smooth_width = 0.1;
    // Midpoint rule in cos(theta) as an independent check.
    const int m = 400000;
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
        const double c = -1.0 + (i + 0.5) * 2.0 / m;
        sum += cutoff_weight(p, kappa * (1 - c * c));
    }
    CHECK(cutoff_solid_angle(p, kappa) == doctest::Approx(2 * M_PI * sum * 2.0 / m).epsilon(1e-6));
}

TEST_CASE("kernel class")
{
    KernelParams p;
    for (double b : {0.0, 1.0, 2.9}) {
        p.b = b;
        const KernelClassReport r = validate_class(p, 20000, 4);
        CHECK(r.passed);
        CHECK(r.violations == 0);
    }

    SUBCASE("corrupted kernel fails")
    {
        p.b = 1.0;
        const KernelFunction doubled = [p](double g, double w) {
            KernelParams q = p;
            q.sigma1 *= 2.0;
            return KernelEvaluation{sigma(q, g, w), dsigma_dg(q, g, w)};
        };
        const KernelClassReport r = validate_class(p, doubled, 20000, 4);
        CHECK_FALSE(r.passed);
        CHECK(r.violations > 0);
    }
}

TEST_CASE("parameter validation")
{
    KernelParams p;
    p.b = 3.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p.b = -0.1;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p.b = 1.0;
    p.B = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    CHECK_THROWS_AS(parse_angular_mode("round"), InvalidArgument);
    CHECK(parse_angular_mode("sharp") == AngularMode::SharpCutoff);
}
