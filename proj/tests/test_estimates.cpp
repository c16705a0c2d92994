#include "rwb/errors.hpp"
#include "rwb/estimates.hpp"

#include <doctest.h>

#include <cmath>

using namespace rwb;

TEST_CASE("analytic derivatives: hand values")
{
    const AnalyticDerivatives d =
        analytic_derivatives({1, 0, 0}, {0, 1, 0}, UnitVector::normalized({1, 1, 1}), 1.0);
    CHECK(d.d_v0.x == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(d.d_v0.y == 0.0);
    CHECK(d.d_v0.z == 0.0);
    CHECK_THROWS_AS(analytic_derivatives({1, 2, 3}, {1, 2, 3}, UnitVector({0, 0, 1}), 1.0), NearSingularInput);
}

TEST_CASE("analytic derivatives against finite differences")
{
    const Vec3 v{0.7, -0.3, 1.1};
    const Vec3 u{-0.4, 0.9, 0.2};
    const UnitVector w = UnitVector::normalized({0.3, 0.5, -0.8});
    for (double R : {1.0, 2.0, 10.0}) {
        const AnalyticDerivatives a = analytic_derivatives(v, u, w, R);
        const AnalyticDerivatives f = finite_difference_derivatives(v, u, w, R, 1e-5);
        for (int i = 0; i < 3; ++i) {
            CHECK(a.d_v0[i] == doctest::Approx(f.d_v0[i]).epsilon(1e-6));
            CHECK(a.d_g[i] == doctest::Approx(f.d_g[i]).epsilon(1e-6));
            CHECK(a.d_sqrt_s[i] == doctest::Approx(f.d_sqrt_s[i]).epsilon(1e-6));
            CHECK(a.d_r[i] == doctest::Approx(f.d_r[i]).epsilon(1e-6));
            for (int k = 0; k < 3; ++k) {
                CHECK(a.d_projection[i][k] == doctest::Approx(f.d_projection[i][k]).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("inequality suites pass and are reproducible")
{
    for (InequalitySuite s : {InequalitySuite::L2_1, InequalitySuite::L2_2_bounds, InequalitySuite::L3_1,
                              InequalitySuite::OmegaRelation}) {
        CAPTURE(to_string(s));
        const CheckReport a = verify_inequalities(s, 20000, 5);
        CHECK(a.passed());
        CHECK(a.samples_run == 20000);
        const CheckReport b = verify_inequalities(s, 20000, 5);
        CHECK(a.to_json().dump() == b.to_json().dump());
    }
    const CheckReport l31 = verify_inequalities(InequalitySuite::L3_1, 20000, 5, 1.0);
    CHECK(l31.metric("max_defect") <= 1.0 + 1e-9);
}

TEST_CASE("L3_1 with B = 0 reports violations")
{
    const CheckReport r = verify_inequalities(InequalitySuite::L3_1, 20000, 5, 0.0);
    CHECK_FALSE(r.passed());
    CHECK(r.violations > 0);
}

TEST_CASE("conservation and cross representation")
{
    for (Representation rep : {Representation::OmegaR, Representation::OmegaRS}) {
        CHECK(verify_conservation(rep, 20000, 2).passed());
    }
    CHECK(verify_cross_representation(20000, 2).passed());
}

TEST_CASE("derivative identities")
{
    const CheckReport r = verify_derivative_identities(2000, 8);
    CHECK(r.passed());
    CHECK(r.metric("fd_order") == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("integral bounds")
{
    const CheckReport a0 = verify_integral_bound_l23(0.0, 16);
    CHECK(a0.passed());
    CHECK(a0.metric("integral_at_0") == doctest::Approx(std::pow(M_PI, 1.5)).epsilon(1e-6));

    const CheckReport b0 = verify_integral_bound_l33(0.0, 16);
    CHECK(b0.passed());
    CHECK(std::fabs(b0.metric("exponent_bound")) <= 0.1);
    const CheckReport b3 = verify_integral_bound_l33(3.0, 16);
    CHECK(b3.passed());
    CHECK(b3.metric("exponent_integral") == doctest::Approx(2.0).epsilon(0.075));
}

TEST_CASE("L3_2")
{
    KernelParams k;
    k.b = 1.0;
    CHECK(verify_l32(k).passed());
    k.angular_mode = AngularMode::SharpCutoff;
    CHECK(verify_l32(k).passed());
}

TEST_CASE("jacobians")
{
    const Vec3 v{0.4, -1.0, 2.0};
    const UnitVector w = UnitVector::normalized({1, 2, 2});
    // At g = 0 the map is v' = v, but g grows like |dv| there, so v' is only
    // Lipschitz; the g-part is even in dv and central differences see n / 2.
    CHECK(max_abs(post_collision(v, v, w, 3.0, Representation::OmegaR).v_prime - v) < 1e-14);
    const Mat3 j = jacobian_fd(v, v, w, 3.0, Representation::OmegaR);
    for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < 3; ++k) CHECK(j[i][k] == doctest::Approx(i == k ? 0.5 : 0.0).epsilon(1e-6));
    }
    const CheckReport r = verify_jacobian_bounds(4000, 3);
    CHECK(r.passed());
    CHECK(r.metric("case3_doubling_ratio") <= 1.1);
}

TEST_CASE("suites by name")
{
    CHECK_THROWS_AS(run_suite("L9_9", 10, 1), InvalidArgument);
    const auto reports = run_suite("omega", 5000, 1);
    CHECK(reports.size() == 2);
    CheckReport r;
    CHECK_THROWS(r.metric("missing"));
}
